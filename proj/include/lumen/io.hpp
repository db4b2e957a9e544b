#pragma once

#include <filesystem>

#include "lumen/image.hpp"

namespace lumen {

/// Loads an 8-bit grayscale image from a PNG or binary PGM (P5) file.
/// The format is detected from the file's magic bytes. Color inputs are
/// converted with luma = round(0.299 R + 0.587 G + 0.114 B).
/// Throws UnreadableImageError with the offending path on failure.
GrayImage load_image(const std::filesystem::path& path);

/// Writes an 8-bit grayscale image. The format follows the extension:
/// ".pgm" writes binary PGM (P5), anything else writes PNG.
void save_image(const GrayImage& img, const std::filesystem::path& path);

}  // namespace lumen
