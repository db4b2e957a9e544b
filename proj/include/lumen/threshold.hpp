#pragma once

#include <string>
#include <vector>

#include "lumen/image.hpp"

namespace lumen {

struct ThresholdConfig {
    double alpha = 2.0;       // entropy weight
    double beta = 0.25;       // gradient weight
    double delta = 0.5;       // local scale
    int subregion_size = 40;  // square cell side in pixels
    double f_t_min = 7.0;     // minimum FAST threshold

    void validate() const;
};

/// Whole-image statistics behind the global threshold.
struct GlobalStats {
    double entropy = 0.0;           // bits, in [0, 8]
    double mean_gradient = 0.0;     // mean Sobel magnitude per pixel
    double global_threshold = 0.0;  // alpha * entropy + beta * mean_gradient
};

/// Per-subregion threshold record.
struct ThresholdCell {
    int otsu = 0;                     // Otsu threshold of the cell
    std::uint8_t center_intensity = 0;
    double local = 0.0;               // delta * |center - otsu|
    double final_threshold = 0.0;     // local clipped into [f_t_min, max(f_t_min, global)]
};

/// Grid of clipped per-subregion FAST thresholds. Cells tile the image;
/// the last row/column cells may be truncated rectangles.
struct ThresholdMap {
    int width = 0;      // source image dimensions
    int height = 0;
    int cell_size = 0;
    int grid_w = 0;
    int grid_h = 0;
    std::vector<ThresholdCell> cells;  // row-major, grid_w * grid_h
    GlobalStats global;

    const ThresholdCell& cell(int cx, int cy) const { return cells[static_cast<std::size_t>(cy) * grid_w + cx]; }
    Rect cell_rect(int cx, int cy) const;

    /// Threshold for a pixel position in the source image frame.
    double threshold_at(double x, double y) const;

    /// A synthetic map with one uniform threshold everywhere; used when the
    /// adaptive stage is disabled.
    static ThresholdMap uniform(int width, int height, int cell_size, double threshold);
};

/// Shannon entropy of the intensity distribution, base-2 (bits).
double entropy(const GrayImage& img);

/// Mean Sobel gradient magnitude over all pixels (replicate borders).
double mean_gradient(const GrayImage& img);

double global_threshold(double entropy_bits, double mean_grad, const ThresholdConfig& cfg);

/// Otsu threshold of a region: the argmax over t in [0,254] of the
/// between-class variance, evaluated only where the class split is proper
/// (P_t strictly inside (0,1)). Ties break toward the smallest t.
/// A single-intensity region returns that intensity.
int otsu_threshold(const GrayImage& img, const Rect& region);

struct LocalThreshold {
    std::uint8_t center_intensity = 0;
    int otsu = 0;
    double local = 0.0;
};

LocalThreshold local_threshold(const GrayImage& img, const Rect& region, const ThresholdConfig& cfg);

ThresholdMap threshold_map(const GrayImage& img, const ThresholdConfig& cfg);

/// JSON dump of the map (grid dims, global stats, per-cell records).
std::string threshold_map_json(const ThresholdMap& map);

}  // namespace lumen
