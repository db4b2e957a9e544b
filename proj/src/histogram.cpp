#include "lumen/histogram.hpp"

#include "lumen/errors.hpp"

namespace lumen {

Histogram histogram(const GrayImage& img) {
    Histogram h;
    for (std::uint8_t v : img.data()) ++h.bins[v];
    return h;
}

Histogram histogram(const GrayImage& img, const Rect& region) {
    Histogram h;
    for (int y = region.y; y < region.y + region.h; ++y) {
        const std::uint8_t* row = img.row(y);
        for (int x = region.x; x < region.x + region.w; ++x) ++h.bins[row[x]];
    }
    return h;
}

ProbDist normalize_histogram(const Histogram& h) {
    const std::uint64_t total = h.total();
    if (total == 0) throw EmptyHistogramError("normalize_histogram: all bins are zero");
    ProbDist d;
    const double denom = static_cast<double>(total);
    for (int i = 0; i < 256; ++i) d.p[i] = static_cast<double>(h.bins[i]) / denom;
    return d;
}

}  // namespace lumen
