#include "lumen/synthetic.hpp"

#include <algorithm>

namespace lumen {

GrayImage synthetic_textured_frame(int width, int height, std::uint64_t seed) {
    SplitMix64 rng(seed);
    GrayImage img(width, height);

    // Diagonal gradient background.
    for (int y = 0; y < height; ++y) {
        std::uint8_t* row = img.row(y);
        for (int x = 0; x < width; ++x) {
            const double g = 60.0 + 80.0 * (static_cast<double>(x) / width) +
                             40.0 * (static_cast<double>(y) / height);
            row[x] = quantize_u8(g);
        }
    }

    // Random axis-aligned rectangles provide strong corners.
    const int n_rects = std::max(20, width * height / 6000);
    for (int i = 0; i < n_rects; ++i) {
        const int rw = 4 + static_cast<int>(rng.below(static_cast<std::uint32_t>(std::max(8, width / 8))));
        const int rh = 4 + static_cast<int>(rng.below(static_cast<std::uint32_t>(std::max(8, height / 8))));
        const int rx = static_cast<int>(rng.below(static_cast<std::uint32_t>(std::max(1, width - rw))));
        const int ry = static_cast<int>(rng.below(static_cast<std::uint32_t>(std::max(1, height - rh))));
        const std::uint8_t value = static_cast<std::uint8_t>(rng.below(256));
        for (int y = ry; y < ry + rh; ++y) {
            std::uint8_t* row = img.row(y);
            for (int x = rx; x < rx + rw; ++x) row[x] = value;
        }
    }

    // Mild speckle so the histogram is busy.
    const int n_speckles = width * height / 50;
    for (int i = 0; i < n_speckles; ++i) {
        const int x = static_cast<int>(rng.below(static_cast<std::uint32_t>(width)));
        const int y = static_cast<int>(rng.below(static_cast<std::uint32_t>(height)));
        img.at(x, y) = static_cast<std::uint8_t>(rng.below(256));
    }
    return img;
}

}  // namespace lumen
