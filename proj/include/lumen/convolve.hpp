#pragma once

#include <utility>

#include "lumen/image.hpp"

namespace lumen {

/// Border handling for convolution. Replicate is the single v1 policy:
/// out-of-range taps read the nearest edge pixel.
enum class BorderPolicy {
    Replicate,
};

/// 2-D correlation-style convolution (no kernel flip; the kernels used in
/// this pipeline are symmetric). Output is real-valued; callers quantize
/// at stage boundaries. Kernel sides must be odd.
SignedImage convolve(const GrayImage& img, const Kernel& kernel,
                     BorderPolicy border = BorderPolicy::Replicate);

/// Gradients (I_x, I_y) via the standard 3x3 Sobel kernels with replicate
/// borders. I_x responds to horizontal intensity change.
std::pair<SignedImage, SignedImage> sobel_gradients(const GrayImage& img);

}  // namespace lumen
