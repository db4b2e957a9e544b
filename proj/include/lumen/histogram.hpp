#pragma once

#include <array>
#include <cstdint>

#include "lumen/image.hpp"

namespace lumen {

/// 256-bin intensity histogram.
struct Histogram {
    std::array<std::uint64_t, 256> bins{};

    std::uint64_t total() const {
        std::uint64_t sum = 0;
        for (auto b : bins) sum += b;
        return sum;
    }
};

/// Normalized histogram: p(i) in [0,1], sum 1.
struct ProbDist {
    std::array<double, 256> p{};
};

/// Counts pixels per intensity level.
Histogram histogram(const GrayImage& img);

/// Histogram over a rectangular subregion of the image.
Histogram histogram(const GrayImage& img, const Rect& region);

/// p(i) = H(i) / sum(H). Throws EmptyHistogramError if all bins are zero.
ProbDist normalize_histogram(const Histogram& h);

}  // namespace lumen
