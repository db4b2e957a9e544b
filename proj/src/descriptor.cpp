#include "lumen/descriptor.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "lumen/errors.hpp"

namespace lumen {

namespace {

constexpr int kRotationBins = 30;  // 12-degree quantization steps

inline int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

}  // namespace

int hamming_distance(const Descriptor256& a, const Descriptor256& b) {
    int d = 0;
    for (int i = 0; i < 4; ++i) d += std::popcount(a.words[i] ^ b.words[i]);
    return d;
}

double orientation(const GrayImage& img, int x, int y) {
    const int r = kOrientationRadius;
    if (x < r || y < r || x >= img.width() - r || y >= img.height() - r) return 0.0;

    // Image moments over the exact disc u^2 + v^2 <= r^2.
    double m10 = 0.0;
    double m01 = 0.0;
    for (int v = -r; v <= r; ++v) {
        const std::uint8_t* row = img.row(y + v) + x;
        for (int u = -r; u <= r; ++u) {
            if (u * u + v * v > r * r) continue;
            const double intensity = row[u];
            m10 += u * intensity;
            m01 += v * intensity;
        }
    }
    if (m10 == 0.0 && m01 == 0.0) return 0.0;
    return std::atan2(m01, m10);
}

bool can_describe(const GrayImage& img, int x, int y) {
    return x >= kDescriptorMargin && y >= kDescriptorMargin &&
           x < img.width() - kDescriptorMargin && y < img.height() - kDescriptorMargin;
}

Descriptor256 describe(const GrayImage& img, int x, int y, double angle) {
    if (!can_describe(img, x, y))
        throw PatchOutOfBoundsError("describe: rotated pattern does not fit inside the image");

    constexpr double kBinWidth = 2.0 * std::numbers::pi / kRotationBins;
    int bin = round_half_up(angle / kBinWidth) % kRotationBins;
    if (bin < 0) bin += kRotationBins;
    const double theta = bin * kBinWidth;
    const double ca = std::cos(theta);
    const double sa = std::sin(theta);

    const auto& pattern = orb_pattern();
    Descriptor256 desc;
    for (int b = 0; b < 256; ++b) {
        const double x1 = pattern[4 * b + 0];
        const double y1 = pattern[4 * b + 1];
        const double x2 = pattern[4 * b + 2];
        const double y2 = pattern[4 * b + 3];
        const std::uint8_t i1 =
            img.at(x + round_half_up(x1 * ca - y1 * sa), y + round_half_up(x1 * sa + y1 * ca));
        const std::uint8_t i2 =
            img.at(x + round_half_up(x2 * ca - y2 * sa), y + round_half_up(x2 * sa + y2 * ca));
        if (i1 < i2) desc.words[b >> 6] |= std::uint64_t{1} << (b & 63);
    }
    return desc;
}

std::vector<Match> match_descriptors(const std::vector<Descriptor256>& set_a,
                                     const std::vector<Descriptor256>& set_b,
                                     double ratio_threshold) {
    if (set_a.empty() || set_b.empty())
        throw EmptySetError("match_descriptors: both descriptor sets must be non-empty");

    // Nearest neighbour of every b in a, for the mutual-consistency check.
    std::vector<int> best_a_of(set_b.size(), -1);
    for (std::size_t j = 0; j < set_b.size(); ++j) {
        int best = 257;
        for (std::size_t i = 0; i < set_a.size(); ++i) {
            const int d = hamming_distance(set_a[i], set_b[j]);
            if (d < best) {
                best = d;
                best_a_of[j] = static_cast<int>(i);
            }
        }
    }

    std::vector<Match> matches;
    for (std::size_t i = 0; i < set_a.size(); ++i) {
        int best = 257;
        int second = 257;
        int best_j = -1;
        for (std::size_t j = 0; j < set_b.size(); ++j) {
            const int d = hamming_distance(set_a[i], set_b[j]);
            if (d < best) {
                second = best;
                best = d;
                best_j = static_cast<int>(j);
            } else if (d < second) {
                second = d;
            }
        }
        const bool has_second = second <= 256;
        const double ratio = (has_second && second > 0) ? static_cast<double>(best) / second : 0.0;
        if (ratio >= ratio_threshold) continue;
        if (best_a_of[best_j] != static_cast<int>(i)) continue;
        matches.push_back(Match{static_cast<int>(i), best_j, best, ratio});
    }
    return matches;
}

}  // namespace lumen
