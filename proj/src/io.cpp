#include "lumen/io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "lumen/errors.hpp"

namespace lumen {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& why) {
    throw UnreadableImageError("cannot read image '" + path.string() + "': " + why);
}

GrayImage load_png(const std::filesystem::path& path, FilePtr file) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "libpng init failed");
    }

    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "corrupt PNG data");
    }

    png_init_io(png, file.get());
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    // Normalize every input to 8-bit RGB or gray so the luma rule below
    // covers all color types uniformly.
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    pixels.resize(stride * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (width < static_cast<png_uint_32>(kMinImageSide) || height < static_cast<png_uint_32>(kMinImageSide))
        fail(path, "image smaller than 8x8");

    std::vector<std::uint8_t> gray(static_cast<std::size_t>(width) * height);
    if (channels == 1) {
        for (png_uint_32 y = 0; y < height; ++y)
            std::memcpy(gray.data() + static_cast<std::size_t>(y) * width, pixels.data() + y * stride, width);
    } else if (channels == 3) {
        for (png_uint_32 y = 0; y < height; ++y) {
            const std::uint8_t* src = pixels.data() + y * stride;
            std::uint8_t* dst = gray.data() + static_cast<std::size_t>(y) * width;
            for (png_uint_32 x = 0; x < width; ++x) {
                const double luma = 0.299 * src[3 * x] + 0.587 * src[3 * x + 1] + 0.114 * src[3 * x + 2];
                dst[x] = quantize_u8(luma);
            }
        }
    } else {
        fail(path, "unsupported channel count " + std::to_string(channels));
    }
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(gray));
}

GrayImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open file");

    auto next_token = [&]() -> std::string {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {
                while ((c = in.get()) != EOF && c != '\n') {
                }
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        return tok;
    };

    if (next_token() != "P5") fail(path, "not a binary PGM (P5) file");
    int width = 0, height = 0, maxval = 0;
    try {
        width = std::stoi(next_token());
        height = std::stoi(next_token());
        maxval = std::stoi(next_token());
    } catch (const std::exception&) {
        fail(path, "malformed PGM header");
    }
    if (maxval != 255) fail(path, "only maxval 255 PGM is supported");
    if (width < kMinImageSide || height < kMinImageSide) fail(path, "image smaller than 8x8");

    std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (in.gcount() != static_cast<std::streamsize>(data.size())) fail(path, "truncated PGM pixel data");
    return GrayImage(width, height, std::move(data));
}

void save_png(const GrayImage& img, const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.string().c_str(), "wb"));
    if (!file) throw IoError("cannot write image '" + path.string() + "'");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed for '" + path.string() + "'");
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height(); ++y)
        png_write_row(png, const_cast<png_bytep>(img.row(y)));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write image '" + path.string() + "'");
    out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data().data()),
              static_cast<std::streamsize>(img.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.string().c_str(), "rb"));
    if (!file) fail(path, "cannot open file");
    unsigned char magic[8] = {};
    const std::size_t got = std::fread(magic, 1, sizeof(magic), file.get());
    std::rewind(file.get());
    if (got >= 8 && png_sig_cmp(magic, 0, 8) == 0) return load_png(path, std::move(file));
    if (got >= 2 && magic[0] == 'P' && magic[1] == '5') {
        file.reset();
        return load_pgm(path);
    }
    fail(path, "unrecognized image format (expected PNG or P5 PGM)");
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
    if (path.extension() == ".pgm")
        save_pgm(img, path);
    else
        save_png(img, path);
}

}  // namespace lumen
