#include "lumen/detect.hpp"

#include <algorithm>
#include <cmath>

#include "lumen/errors.hpp"

namespace lumen {

namespace {

// Bresenham circle of radius 3, clockwise from 12 o'clock.
constexpr int kCircleDx[16] = {0, 1, 2, 3, 3, 3, 2, 1, 0, -1, -2, -3, -3, -3, -2, -1};
constexpr int kCircleDy[16] = {-3, -3, -2, -1, 0, 1, 2, 3, 3, 3, 2, 1, 0, -1, -2, -3};

void check_margin(const GrayImage& img, int x, int y) {
    if (x < 3 || y < 3 || x >= img.width() - 3 || y >= img.height() - 3)
        throw OutOfBoundsError("FAST: pixel closer than 3 px to a border");
}

/// True iff the 32-bit word (16 circle bits duplicated) contains a run of
/// at least 9 consecutive set bits starting in the low half.
inline bool has_arc9(std::uint32_t mask16) {
    std::uint32_t x = mask16 | (mask16 << 16);
    x &= x >> 1;  // runs of >= 2
    x &= x >> 2;  // runs of >= 4
    x &= x >> 4;  // runs of >= 8
    x &= x >> 1;  // runs of >= 9
    return (x & 0xFFFFu) != 0;
}

inline bool segment_test_at(const std::uint8_t* p, std::ptrdiff_t stride, double t) {
    const double center = p[0];
    const double hi = center + t;
    const double lo = center - t;
    std::uint32_t bright = 0;
    std::uint32_t dark = 0;
    for (int i = 0; i < 16; ++i) {
        const double v = p[kCircleDy[i] * stride + kCircleDx[i]];
        bright |= static_cast<std::uint32_t>(v > hi) << i;
        dark |= static_cast<std::uint32_t>(v < lo) << i;
    }
    return has_arc9(bright) || has_arc9(dark);
}

struct Candidate {
    int x;
    int y;
    int score;
};

int score_at(const GrayImage& img, int x, int y) {
    const std::uint8_t* p = img.row(y) + x;
    const std::ptrdiff_t stride = img.width();
    if (!segment_test_at(p, stride, 0.0)) return 0;
    // passes(t) is monotone nonincreasing in t and always fails at 255.
    int lo = 0, hi = 255;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (segment_test_at(p, stride, static_cast<double>(mid)))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

/// One pyramid level: segment test with per-pixel thresholds, scoring, and
/// NMS against all passing candidates within the radius.
std::vector<Candidate> detect_level(const GrayImage& img, const std::vector<double>& row_thresholds,
                                    const std::vector<int>& col_cell, const std::vector<int>& row_cell,
                                    int grid_w, int nms_radius) {
    const int w = img.width();
    const int h = img.height();

    std::vector<Candidate> passing;
    std::vector<int> score_grid(static_cast<std::size_t>(w) * h, -1);
    for (int y = 3; y < h - 3; ++y) {
        const std::uint8_t* row = img.row(y);
        const int cell_row = row_cell[y] * grid_w;
        for (int x = 3; x < w - 3; ++x) {
            const double t = row_thresholds[cell_row + col_cell[x]];
            if (!segment_test_at(row + x, w, t)) continue;
            const int score = score_at(img, x, y);
            passing.push_back({x, y, score});
            score_grid[static_cast<std::size_t>(y) * w + x] = score;
        }
    }

    const int r = nms_radius;
    const int r2 = r * r;
    std::vector<Candidate> kept;
    for (const Candidate& c : passing) {
        bool winner = true;
        for (int dy = -r; dy <= r && winner; ++dy) {
            const int ny = c.y + dy;
            if (ny < 0 || ny >= h) continue;
            for (int dx = -r; dx <= r; ++dx) {
                if (dx == 0 && dy == 0) continue;
                if (dx * dx + dy * dy > r2) continue;
                const int nx = c.x + dx;
                if (nx < 0 || nx >= w) continue;
                const int other = score_grid[static_cast<std::size_t>(ny) * w + nx];
                if (other < 0) continue;
                // Equal scores: the smaller (y,x) survives.
                if (other > c.score || (other == c.score && (ny < c.y || (ny == c.y && nx < c.x)))) {
                    winner = false;
                    break;
                }
            }
        }
        if (winner) kept.push_back(c);
    }
    return kept;
}

}  // namespace

void DetectorConfig::validate() const {
    if (n_levels < 1) throw ConfigError("detector.n_levels must be >= 1");
    if (!(scale_factor > 1)) throw ConfigError("detector.scale_factor must be > 1");
    if (nms_radius < 1) throw ConfigError("detector.nms_radius must be >= 1");
    if (max_features <= 0) throw ConfigError("detector.max_features must be > 0");
}

GrayImage bilinear_resize(const GrayImage& src, int dst_w, int dst_h) {
    GrayImage dst(dst_w, dst_h);
    const double sx = static_cast<double>(src.width()) / dst_w;
    const double sy = static_cast<double>(src.height()) / dst_h;
    for (int y = 0; y < dst_h; ++y) {
        // Half-pixel-center mapping.
        const double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        const double wy = fy - y0;
        y0 = std::clamp(y0, 0, src.height() - 1);
        const int y1 = std::min(y0 + 1, src.height() - 1);
        for (int x = 0; x < dst_w; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            const double wx = fx - x0;
            x0 = std::clamp(x0, 0, src.width() - 1);
            const int x1 = std::min(x0 + 1, src.width() - 1);
            const double top = (1.0 - wx) * src.at(x0, y0) + wx * src.at(x1, y0);
            const double bottom = (1.0 - wx) * src.at(x0, y1) + wx * src.at(x1, y1);
            dst.at(x, y) = quantize_u8((1.0 - wy) * top + wy * bottom);
        }
    }
    return dst;
}

Pyramid build_pyramid(const GrayImage& img, const DetectorConfig& cfg) {
    Pyramid pyr;
    pyr.levels.reserve(cfg.n_levels);
    pyr.scales.reserve(cfg.n_levels);
    pyr.levels.push_back(img);
    pyr.scales.push_back(1.0);
    for (int level = 1; level < cfg.n_levels; ++level) {
        const double scale = std::pow(cfg.scale_factor, level);
        const int w = std::max(kMinImageSide, static_cast<int>(std::lround(img.width() / scale)));
        const int h = std::max(kMinImageSide, static_cast<int>(std::lround(img.height() / scale)));
        pyr.levels.push_back(bilinear_resize(pyr.levels.back(), w, h));
        pyr.scales.push_back(scale);
    }
    return pyr;
}

bool fast_segment_test(const GrayImage& img, int x, int y, double t) {
    check_margin(img, x, y);
    const double center = img.at(x, y);
    const double hi = center + t;
    const double lo = center - t;

    bool state[16];
    // Brighter arc, then darker arc, each checked for a circular run of 9.
    for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < 16; ++i) {
            const double v = img.at(x + kCircleDx[i], y + kCircleDy[i]);
            state[i] = pass == 0 ? (v > hi) : (v < lo);
        }
        for (int start = 0; start < 16; ++start) {
            bool run = true;
            for (int k = 0; k < kFastArcLength; ++k) {
                if (!state[(start + k) & 15]) {
                    run = false;
                    break;
                }
            }
            if (run) return true;
        }
    }
    return false;
}

std::vector<std::pair<int, int>> fast_corners(const GrayImage& img, double t) {
    std::vector<std::pair<int, int>> out;
    const int w = img.width();
    for (int y = 3; y < img.height() - 3; ++y) {
        const std::uint8_t* row = img.row(y);
        for (int x = 3; x < w - 3; ++x)
            if (segment_test_at(row + x, w, t)) out.emplace_back(x, y);
    }
    return out;
}

int corner_score(const GrayImage& img, int x, int y) {
    check_margin(img, x, y);
    return score_at(img, x, y);
}

std::vector<Keypoint> detect(const Pyramid& pyramid, const ThresholdMap& tmap,
                             const DetectorConfig& cfg) {
    std::vector<Keypoint> all;
    for (std::size_t level = 0; level < pyramid.levels.size(); ++level) {
        const GrayImage& img = pyramid.levels[level];
        const double scale = pyramid.scales[level];

        // Cell lookup for level coordinates projected into the level-0 frame.
        std::vector<int> col_cell(img.width());
        for (int x = 0; x < img.width(); ++x) {
            const int x0 = std::clamp(static_cast<int>(x * scale), 0, tmap.width - 1);
            col_cell[x] = std::min(x0 / tmap.cell_size, tmap.grid_w - 1);
        }
        std::vector<int> row_cell(img.height());
        for (int y = 0; y < img.height(); ++y) {
            const int y0 = std::clamp(static_cast<int>(y * scale), 0, tmap.height - 1);
            row_cell[y] = std::min(y0 / tmap.cell_size, tmap.grid_h - 1);
        }
        std::vector<double> thresholds(tmap.cells.size());
        for (std::size_t i = 0; i < tmap.cells.size(); ++i) thresholds[i] = tmap.cells[i].final_threshold;

        for (const Candidate& c :
             detect_level(img, thresholds, col_cell, row_cell, tmap.grid_w, cfg.nms_radius)) {
            Keypoint kp;
            kp.x = c.x * scale;
            kp.y = c.y * scale;
            kp.octave = static_cast<int>(level);
            kp.response = c.score;
            all.push_back(kp);
        }
    }

    std::stable_sort(all.begin(), all.end(), [](const Keypoint& a, const Keypoint& b) {
        if (a.response != b.response) return a.response > b.response;
        if (a.octave != b.octave) return a.octave < b.octave;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    if (static_cast<int>(all.size()) > cfg.max_features) all.resize(cfg.max_features);
    return all;
}

std::vector<Keypoint> detect(const GrayImage& frame, const ThresholdMap& tmap,
                             const DetectorConfig& cfg) {
    return detect(build_pyramid(frame, cfg), tmap, cfg);
}

}  // namespace lumen
