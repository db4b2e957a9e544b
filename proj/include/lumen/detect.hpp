#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "lumen/image.hpp"
#include "lumen/threshold.hpp"

namespace lumen {

/// Contiguous-arc length of the segment test. Fixed: the oracle tests and
/// the corner score assume the 9-of-16 variant.
inline constexpr int kFastArcLength = 9;

struct DetectorConfig {
    int n_levels = 4;          // pyramid levels
    double scale_factor = 1.2; // per-level downscale
    int nms_radius = 3;        // suppression radius in pixels
    int max_features = 2000;   // per-frame cap

    void validate() const;
};

/// Detected corner. Coordinates are sub-pixel in the level-0 frame; the
/// angle stays NaN until the descriptor stage fills it.
struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    int octave = 0;
    int response = 0;
    double angle = std::numeric_limits<double>::quiet_NaN();

    bool angle_set() const { return angle == angle; }
};

/// Image pyramid: level L is level L-1 resampled by 1/scale_factor
/// (bilinear). scales[L] maps level-L coordinates into the level-0 frame.
struct Pyramid {
    std::vector<GrayImage> levels;
    std::vector<double> scales;
};

GrayImage bilinear_resize(const GrayImage& src, int dst_w, int dst_h);

Pyramid build_pyramid(const GrayImage& img, const DetectorConfig& cfg);

/// Reference FAST-9 segment test: true iff at least 9 contiguous pixels on
/// the 16-pixel Bresenham circle of radius 3 are all brighter than
/// center + t or all darker than center - t. The threshold may be
/// fractional. Throws OutOfBoundsError within 3 pixels of a border.
bool fast_segment_test(const GrayImage& img, int x, int y, double t);

/// All pixels passing the segment test at one uniform threshold, pre-NMS,
/// in row-major scan order. Uses a bitmask fast path that is bit-identical
/// to the reference predicate (covered by tests).
std::vector<std::pair<int, int>> fast_corners(const GrayImage& img, double t);

/// Maximal integer threshold at which the segment test still passes
/// (binary search); 0 when the pixel never passes.
int corner_score(const GrayImage& img, int x, int y);

/// FAST-9 detection over the pyramid with per-cell thresholds.
///
/// Each candidate reads the threshold of the map cell containing its
/// level-0-projected coordinates. NMS keeps a keypoint only if its score
/// strictly beats every passing candidate within nms_radius at the same
/// level (equal scores lose to the smaller (y,x)). Results are merged
/// across levels, sorted by (response desc, octave, y, x), and truncated
/// to max_features.
std::vector<Keypoint> detect(const GrayImage& frame, const ThresholdMap& tmap,
                             const DetectorConfig& cfg);

/// detect() on an already-built pyramid of the same frame.
std::vector<Keypoint> detect(const Pyramid& pyramid, const ThresholdMap& tmap,
                             const DetectorConfig& cfg);

}  // namespace lumen
