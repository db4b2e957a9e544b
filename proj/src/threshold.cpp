#include "lumen/threshold.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "lumen/convolve.hpp"
#include "lumen/errors.hpp"
#include "lumen/histogram.hpp"

namespace lumen {

void ThresholdConfig::validate() const {
    if (alpha < 0) throw ConfigError("threshold.alpha must be >= 0");
    if (beta < 0) throw ConfigError("threshold.beta must be >= 0");
    if (!(delta > 0)) throw ConfigError("threshold.delta must be > 0");
    if (subregion_size < 8) throw ConfigError("threshold.subregion_size must be >= 8");
    if (f_t_min < 1) throw ConfigError("threshold.f_t_min must be >= 1");
}

Rect ThresholdMap::cell_rect(int cx, int cy) const {
    const int x0 = cx * cell_size;
    const int y0 = cy * cell_size;
    return Rect{x0, y0, std::min(cell_size, width - x0), std::min(cell_size, height - y0)};
}

double ThresholdMap::threshold_at(double x, double y) const {
    int px = static_cast<int>(x);
    int py = static_cast<int>(y);
    px = std::clamp(px, 0, width - 1);
    py = std::clamp(py, 0, height - 1);
    const int cx = std::min(px / cell_size, grid_w - 1);
    const int cy = std::min(py / cell_size, grid_h - 1);
    return cell(cx, cy).final_threshold;
}

ThresholdMap ThresholdMap::uniform(int width, int height, int cell_size, double threshold) {
    ThresholdMap map;
    map.width = width;
    map.height = height;
    map.cell_size = cell_size;
    map.grid_w = (width + cell_size - 1) / cell_size;
    map.grid_h = (height + cell_size - 1) / cell_size;
    ThresholdCell cell;
    cell.final_threshold = threshold;
    cell.local = threshold;
    map.cells.assign(static_cast<std::size_t>(map.grid_w) * map.grid_h, cell);
    return map;
}

double entropy(const GrayImage& img) {
    const ProbDist dist = normalize_histogram(histogram(img));
    double h = 0.0;
    for (double p : dist.p)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

double mean_gradient(const GrayImage& img) {
    const auto [gx, gy] = sobel_gradients(img);
    const auto& vx = gx.data();
    const auto& vy = gy.data();
    double sum = 0.0;
    for (std::size_t i = 0; i < vx.size(); ++i) sum += std::sqrt(vx[i] * vx[i] + vy[i] * vy[i]);
    return sum / static_cast<double>(vx.size());
}

double global_threshold(double entropy_bits, double mean_grad, const ThresholdConfig& cfg) {
    return cfg.alpha * entropy_bits + cfg.beta * mean_grad;
}

int otsu_threshold(const GrayImage& img, const Rect& region) {
    if (region.w <= 0 || region.h <= 0) throw DimensionError("otsu_threshold: empty region");
    const ProbDist dist = normalize_histogram(histogram(img, region));

    double mu_total = 0.0;
    for (int i = 0; i < 256; ++i) mu_total += i * dist.p[i];

    int best_t = -1;
    double best_var = -1.0;
    double p_cum = 0.0;
    double mu_cum = 0.0;
    for (int t = 0; t <= 254; ++t) {
        p_cum += dist.p[t];
        mu_cum += t * dist.p[t];
        if (!(p_cum > 0.0 && p_cum < 1.0)) continue;  // improper split, variance undefined
        const double num = mu_total * p_cum - mu_cum;
        const double var = (num * num) / (p_cum * (1.0 - p_cum));
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    if (best_t >= 0) return best_t;

    // Single-intensity region: return that intensity.
    for (int i = 0; i < 256; ++i)
        if (dist.p[i] > 0.0) return i;
    return 0;  // unreachable on valid input
}

LocalThreshold local_threshold(const GrayImage& img, const Rect& region, const ThresholdConfig& cfg) {
    LocalThreshold out;
    out.center_intensity = img.at(region.x + region.w / 2, region.y + region.h / 2);
    out.otsu = otsu_threshold(img, region);
    out.local = cfg.delta * std::abs(static_cast<double>(out.center_intensity) - out.otsu);
    return out;
}

ThresholdMap threshold_map(const GrayImage& img, const ThresholdConfig& cfg) {
    ThresholdMap map;
    map.width = img.width();
    map.height = img.height();
    map.cell_size = cfg.subregion_size;
    map.grid_w = (img.width() + cfg.subregion_size - 1) / cfg.subregion_size;
    map.grid_h = (img.height() + cfg.subregion_size - 1) / cfg.subregion_size;

    map.global.entropy = entropy(img);
    map.global.mean_gradient = mean_gradient(img);
    map.global.global_threshold = global_threshold(map.global.entropy, map.global.mean_gradient, cfg);

    // When the global threshold falls below the floor the clip range is
    // empty; the floor wins so the detector is never flooded with noise.
    const double upper = std::max(map.global.global_threshold, cfg.f_t_min);

    map.cells.reserve(static_cast<std::size_t>(map.grid_w) * map.grid_h);
    for (int cy = 0; cy < map.grid_h; ++cy) {
        for (int cx = 0; cx < map.grid_w; ++cx) {
            const LocalThreshold local = local_threshold(img, map.cell_rect(cx, cy), cfg);
            ThresholdCell cell;
            cell.otsu = local.otsu;
            cell.center_intensity = local.center_intensity;
            cell.local = local.local;
            cell.final_threshold = std::clamp(local.local, cfg.f_t_min, upper);
            map.cells.push_back(cell);
        }
    }
    return map;
}

std::string threshold_map_json(const ThresholdMap& map) {
    nlohmann::ordered_json j;
    j["width"] = map.width;
    j["height"] = map.height;
    j["cell_size"] = map.cell_size;
    j["grid_w"] = map.grid_w;
    j["grid_h"] = map.grid_h;
    j["global"] = {{"entropy", map.global.entropy},
                   {"mean_gradient", map.global.mean_gradient},
                   {"global_threshold", map.global.global_threshold}};
    auto cells = nlohmann::ordered_json::array();
    for (const auto& c : map.cells) {
        cells.push_back({{"otsu", c.otsu},
                         {"center_intensity", c.center_intensity},
                         {"local", c.local},
                         {"final", c.final_threshold}});
    }
    j["cells"] = std::move(cells);
    return j.dump(2);
}

}  // namespace lumen
