#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lumen/errors.hpp"

namespace lumen {

/// Minimum image side length. The FAST detector needs a 3-pixel margin,
/// and several stages assume non-degenerate rasters.
inline constexpr int kMinImageSide = 8;

/// Integer rectangle in pixel coordinates, half-open in both axes.
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
};

/// 8-bit single-channel raster, row-major. The universal pixel carrier.
class GrayImage {
public:
    GrayImage(int width, int height)
        : width_(width), height_(height), data_(check_dims(width, height), 0) {}

    GrayImage(int width, int height, std::vector<std::uint8_t> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (data_.size() != check_dims(width, height))
            throw DimensionError("GrayImage: data length does not match width*height");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    std::uint8_t at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    std::uint8_t& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    const std::uint8_t* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }
    std::uint8_t* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_; }

    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

    Rect bounds() const { return Rect{0, 0, width_, height_}; }

    bool operator==(const GrayImage& other) const = default;

private:
    static std::size_t check_dims(int width, int height) {
        if (width < kMinImageSide || height < kMinImageSide)
            throw DimensionError("GrayImage: width and height must both be >= 8");
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
};

/// Real-valued signed raster, row-major. Holds gradients and unsharp masks.
class SignedImage {
public:
    SignedImage(int width, int height)
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0) {
        if (width <= 0 || height <= 0)
            throw DimensionError("SignedImage: width and height must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }

    double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    int width_;
    int height_;
    std::vector<double> data_;
};

/// Small dense real-valued matrix used as a convolution kernel.
struct Kernel {
    int rows = 0;
    int cols = 0;
    std::vector<double> weights;  // row-major, rows*cols entries

    double at(int r, int c) const { return weights[static_cast<std::size_t>(r) * cols + c]; }
    double& at(int r, int c) { return weights[static_cast<std::size_t>(r) * cols + c]; }
};

/// Quantizes a real intensity to 8 bits: round half up, clamp to [0,255].
inline std::uint8_t quantize_u8(double v) {
    double r = std::floor(v + 0.5);
    if (r < 0.0) return 0;
    if (r > 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

/// Per-pixel intensity inversion v -> 255 - v. An involution.
inline GrayImage invert(const GrayImage& img) {
    GrayImage out(img.width(), img.height());
    const auto& src = img.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<std::uint8_t>(255 - src[i]);
    return out;
}

}  // namespace lumen
