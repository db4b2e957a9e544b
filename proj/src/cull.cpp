#include "lumen/cull.hpp"

#include <cmath>
#include <string>

#include "lumen/errors.hpp"

namespace lumen {

void CullConfig::validate() const {
    if (max_per_leaf < 1) throw ConfigError("cull.max_per_leaf must be >= 1");
    if (max_depth < 1) throw ConfigError("cull.max_depth must be >= 1");
    if (!(d_opt > 0)) throw ConfigError("cull.d_opt must be > 0");
    if (w1 < 0 || w2 < 0) throw ConfigError("cull.w1 and cull.w2 must be >= 0");
    if (std::abs(w1 + w2 - 1.0) > 1e-12) throw ConfigError("cull.w1 + cull.w2 must equal 1");
    if (s_min < 0 || s_min > 1) throw ConfigError("cull.s_min must be in [0,1]");
}

int QuadTree::leaf_index(double px, double py) const {
    int i = 0;
    while (!nodes_[i].is_leaf()) {
        const Node& n = nodes_[i];
        const double cx = n.rect.x + n.rect.w / 2.0;
        const double cy = n.rect.y + n.rect.h / 2.0;
        const int right = px >= cx ? 1 : 0;
        const int bottom = py >= cy ? 1 : 0;
        i = n.children[bottom * 2 + right];
    }
    return i;
}

std::vector<int> QuadTree::leaf_indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].is_leaf()) out.push_back(static_cast<int>(i));
    return out;
}

QuadTree build_quadtree(const std::vector<Keypoint>& keypoints, const RectF& bounds,
                        const CullConfig& cfg) {
    for (std::size_t i = 0; i < keypoints.size(); ++i) {
        if (!bounds.contains(keypoints[i].x, keypoints[i].y))
            throw KeypointOutOfBoundsError("build_quadtree: keypoint " + std::to_string(i) +
                                           " outside bounds");
    }

    QuadTree tree;
    auto& nodes = tree.nodes_;
    nodes.emplace_back();
    nodes[0].rect = bounds;
    nodes[0].points.resize(keypoints.size());
    for (std::size_t i = 0; i < keypoints.size(); ++i) nodes[0].points[i] = static_cast<int>(i);

    // Iterative subdivision; children are appended so parents precede them.
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int ni = stack.back();
        stack.pop_back();
        if (static_cast<int>(nodes[ni].points.size()) <= cfg.max_per_leaf ||
            nodes[ni].depth >= cfg.max_depth)
            continue;

        const RectF r = nodes[ni].rect;
        const int depth = nodes[ni].depth;
        const double cx = r.x + r.w / 2.0;
        const double cy = r.y + r.h / 2.0;
        const RectF quads[4] = {
            {r.x, r.y, r.w / 2.0, r.h / 2.0},       // TL
            {cx, r.y, r.w / 2.0, r.h / 2.0},        // TR
            {r.x, cy, r.w / 2.0, r.h / 2.0},        // BL
            {cx, cy, r.w / 2.0, r.h / 2.0},         // BR
        };

        std::vector<int> points = std::move(nodes[ni].points);
        nodes[ni].points.clear();
        for (int q = 0; q < 4; ++q) {
            const int child = static_cast<int>(nodes.size());
            nodes[ni].children[q] = child;
            nodes.emplace_back();
            nodes[child].rect = quads[q];
            nodes[child].depth = depth + 1;
        }
        for (int pi : points) {
            // Boundary points go to the right/bottom child.
            const int right = keypoints[pi].x >= cx ? 1 : 0;
            const int bottom = keypoints[pi].y >= cy ? 1 : 0;
            nodes[nodes[ni].children[bottom * 2 + right]].points.push_back(pi);
        }
        for (int q = 0; q < 4; ++q) stack.push_back(nodes[ni].children[q]);
    }
    return tree;
}

double density(const QuadTree::Node& leaf) {
    return static_cast<double>(leaf.points.size()) / leaf.rect.area();
}

double local_contrast(const GrayImage& img, const RectF& rect) {
    const int x0 = std::max(0, static_cast<int>(std::ceil(rect.x)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(rect.y)));
    const int x1 = std::min(img.width(), static_cast<int>(std::ceil(rect.x + rect.w)));
    const int y1 = std::min(img.height(), static_cast<int>(std::ceil(rect.y + rect.h)));
    if (x0 >= x1 || y0 >= y1) return 0.0;

    std::uint64_t sum = 0;
    for (int y = y0; y < y1; ++y) {
        const std::uint8_t* row = img.row(y);
        for (int x = x0; x < x1; ++x) sum += row[x];
    }
    const std::uint64_t n = static_cast<std::uint64_t>(x1 - x0) * static_cast<std::uint64_t>(y1 - y0);
    const double mean = static_cast<double>(sum) / static_cast<double>(n);

    double sq = 0.0;
    for (int y = y0; y < y1; ++y) {
        const std::uint8_t* row = img.row(y);
        for (int x = x0; x < x1; ++x) {
            const double d = row[x] - mean;
            sq += d * d;
        }
    }
    return std::sqrt(sq / static_cast<double>(n));
}

double lighting_influence(double h_c, const CullConfig& cfg) {
    return 1.0 / (1.0 + std::exp(-cfg.rho * (h_c - cfg.h_th)));
}

double stability_score(double d, double c_light, const CullConfig& cfg) {
    const double density_term = 1.0 / (1.0 + std::exp(-cfg.k * (d - cfg.d_opt)));
    const double lighting_term = cfg.invert_lighting_term ? c_light : 1.0 - c_light;
    return cfg.w1 * density_term + cfg.w2 * lighting_term;
}

CullResult cull(const std::vector<Keypoint>& keypoints, const GrayImage& img,
                const CullConfig& cfg) {
    const RectF bounds{0.0, 0.0, static_cast<double>(img.width()), static_cast<double>(img.height())};
    const QuadTree tree = build_quadtree(keypoints, bounds, cfg);

    // Leaf statistics are shared by every keypoint in the leaf.
    struct LeafStats {
        double area, density, h_c, c_light;
    };
    std::vector<int> leaf_of(keypoints.size(), -1);
    std::vector<LeafStats> stats(tree.node_count());
    for (int li : tree.leaf_indices()) {
        const auto& leaf = tree.node(li);
        if (leaf.points.empty()) continue;
        LeafStats s{};
        s.area = leaf.rect.area();
        s.density = density(leaf);
        s.h_c = local_contrast(img, leaf.rect);
        s.c_light = lighting_influence(s.h_c, cfg);
        stats[li] = s;
        for (int pi : leaf.points) leaf_of[pi] = li;
    }

    CullResult result;
    result.report.reserve(keypoints.size());
    for (std::size_t i = 0; i < keypoints.size(); ++i) {
        const LeafStats& s = stats[leaf_of[i]];
        StabilityRecord rec;
        rec.kp_index = static_cast<int>(i);
        rec.leaf_area = s.area;
        rec.density = s.density;
        rec.h_c = s.h_c;
        rec.c_light = s.c_light;
        rec.score = stability_score(s.density, s.c_light, cfg);
        rec.culled = rec.score < cfg.s_min;
        if (!rec.culled) {
            result.kept.push_back(keypoints[i]);
            result.kept_indices.push_back(static_cast<int>(i));
        }
        result.report.push_back(rec);
    }
    return result;
}

}  // namespace lumen
