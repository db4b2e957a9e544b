#include "lumen/convolve.hpp"

#include <algorithm>

#include "lumen/errors.hpp"

namespace lumen {

namespace {

inline int clamp_coord(int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); }

}  // namespace

SignedImage convolve(const GrayImage& img, const Kernel& kernel, BorderPolicy border) {
    (void)border;  // Replicate is the only policy
    if (kernel.rows % 2 == 0 || kernel.cols % 2 == 0 || kernel.rows <= 0 || kernel.cols <= 0)
        throw EvenKernelError("convolve: kernel dimensions must be odd");

    const int w = img.width();
    const int h = img.height();
    const int ry = kernel.rows / 2;
    const int rx = kernel.cols / 2;
    SignedImage out(w, h);

    // Interior rows/cols never clamp, so they skip the coordinate checks.
    // Both paths accumulate in the same (ky, kx) order to keep results
    // bit-identical regardless of which path a pixel takes.
    const int x0 = std::min(rx, w);
    const int x1 = std::max(x0, w - rx);
    const int y0 = std::min(ry, h);
    const int y1 = std::max(y0, h - ry);

    auto convolve_at_clamped = [&](int x, int y) {
        double acc = 0.0;
        for (int ky = 0; ky < kernel.rows; ++ky) {
            const int sy = clamp_coord(y + ky - ry, h - 1);
            const std::uint8_t* row = img.row(sy);
            for (int kx = 0; kx < kernel.cols; ++kx) {
                const int sx = clamp_coord(x + kx - rx, w - 1);
                acc += kernel.at(ky, kx) * row[sx];
            }
        }
        return acc;
    };

    for (int y = 0; y < h; ++y) {
        const bool interior_row = (y >= y0 && y < y1);
        for (int x = 0; x < x0; ++x) out.at(x, y) = convolve_at_clamped(x, y);
        if (interior_row) {
            for (int x = x0; x < x1; ++x) {
                double acc = 0.0;
                for (int ky = 0; ky < kernel.rows; ++ky) {
                    const std::uint8_t* row = img.row(y + ky - ry) + (x - rx);
                    const double* kw = kernel.weights.data() + static_cast<std::size_t>(ky) * kernel.cols;
                    for (int kx = 0; kx < kernel.cols; ++kx) acc += kw[kx] * row[kx];
                }
                out.at(x, y) = acc;
            }
        } else {
            for (int x = x0; x < x1; ++x) out.at(x, y) = convolve_at_clamped(x, y);
        }
        for (int x = x1; x < w; ++x) out.at(x, y) = convolve_at_clamped(x, y);
    }
    return out;
}

std::pair<SignedImage, SignedImage> sobel_gradients(const GrayImage& img) {
    Kernel gx{3, 3, {-1, 0, 1, -2, 0, 2, -1, 0, 1}};
    Kernel gy{3, 3, {-1, -2, -1, 0, 0, 0, 1, 2, 1}};
    return {convolve(img, gx), convolve(img, gy)};
}

}  // namespace lumen
