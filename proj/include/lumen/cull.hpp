#pragma once

#include <vector>

#include "lumen/detect.hpp"
#include "lumen/image.hpp"

namespace lumen {

struct CullConfig {
    int max_per_leaf = 8;     // keypoints a leaf may hold before subdividing
    int max_depth = 6;        // quad-tree depth limit
    double d_opt = 1e-3;      // optimal keypoint density (keypoints/pixel)
    double k = 2000;          // density sigmoid sharpness
    double rho = 0.15;        // lighting sigmoid sensitivity
    double h_th = 20;         // contrast threshold (intensity units)
    double w1 = 0.6;          // density weight
    double w2 = 0.4;          // lighting weight
    double s_min = 0.3;       // stability threshold below which keypoints are culled
    // Swaps (1 - C_light) for C_light in the stability score. Off keeps the
    // score exactly as printed; see the module notes on the lighting term.
    bool invert_lighting_term = false;

    void validate() const;
};

/// Axis-aligned rectangle with real-valued geometry, half-open.
struct RectF {
    double x = 0;
    double y = 0;
    double w = 0;
    double h = 0;

    bool contains(double px, double py) const {
        return px >= x && px < x + w && py >= y && py < y + h;
    }
    double area() const { return w * h; }
};

/// Quad-tree over keypoint positions. Children exactly partition their
/// parent (split at the geometric center; boundary points go to the
/// right/bottom child). A leaf either holds at most max_per_leaf points or
/// sits at max_depth.
class QuadTree {
public:
    struct Node {
        RectF rect;
        int depth = 0;
        int children[4] = {-1, -1, -1, -1};  // TL, TR, BL, BR; -1 when leaf
        std::vector<int> points;             // keypoint indices, leaves only

        bool is_leaf() const { return children[0] < 0; }
    };

    const Node& node(int i) const { return nodes_[i]; }
    const Node& root() const { return nodes_[0]; }
    std::size_t node_count() const { return nodes_.size(); }

    /// Leaf node index containing the position.
    int leaf_index(double px, double py) const;

    std::vector<int> leaf_indices() const;

    friend QuadTree build_quadtree(const std::vector<Keypoint>& keypoints, const RectF& bounds,
                                   const CullConfig& cfg);

private:
    std::vector<Node> nodes_;
};

/// Builds the tree over keypoint coordinates. Throws
/// KeypointOutOfBoundsError if any keypoint lies outside bounds.
QuadTree build_quadtree(const std::vector<Keypoint>& keypoints, const RectF& bounds,
                        const CullConfig& cfg);

/// Keypoints per pixel of the leaf rectangle.
double density(const QuadTree::Node& leaf);

/// Population standard deviation of the image intensities inside the
/// rectangle (intersected with the image bounds).
double local_contrast(const GrayImage& img, const RectF& rect);

/// Sigmoid lighting-influence factor of a local contrast value.
double lighting_influence(double h_c, const CullConfig& cfg);

/// Stability score blending the density sigmoid with the lighting term.
double stability_score(double d, double c_light, const CullConfig& cfg);

/// Per-keypoint culling evidence.
struct StabilityRecord {
    int kp_index = 0;
    double leaf_area = 0;
    double density = 0;
    double h_c = 0;
    double c_light = 0;
    double score = 0;
    bool culled = false;
};

struct CullResult {
    std::vector<Keypoint> kept;            // input order preserved
    std::vector<int> kept_indices;         // indices into the input list
    std::vector<StabilityRecord> report;   // one record per input keypoint
};

/// Scores every keypoint via its quad-tree leaf and keeps those with
/// S >= s_min.
CullResult cull(const std::vector<Keypoint>& keypoints, const GrayImage& img,
                const CullConfig& cfg);

}  // namespace lumen
