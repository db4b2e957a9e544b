#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lumen/config.hpp"
#include "lumen/descriptor.hpp"

namespace lumen {

enum class SourceKind { Euroc, TumVi, Plain };

SourceKind parse_source_kind(const std::string& name);

/// Ordered image sequence resolved from a dataset directory.
struct FrameSource {
    struct Entry {
        std::int64_t timestamp_ns = 0;
        std::filesystem::path path;
    };
    SourceKind kind = SourceKind::Plain;
    std::vector<Entry> frames;
};

/// Resolves a dataset directory into an ordered frame list.
///
/// euroc/tumvi read <dir>/mav0/cam0/data.csv ("timestamp,filename" lines,
/// '#' comments skipped) with images under mav0/cam0/data/. plain collects
/// *.png and *.pgm lexicographically with synthetic timestamps 0..n-1.
/// Timestamps must be strictly increasing; every image path must exist.
FrameSource load_sequence(const std::filesystem::path& dir, SourceKind kind);

struct StageTimings {
    double enhance_ms = 0;
    double threshold_ms = 0;
    double detect_ms = 0;
    double describe_ms = 0;
    double cull_ms = 0;
    double total_ms = 0;
};

/// Everything the pipeline produced for one frame. Keypoints in `kept`
/// carry angles; `descriptors` is parallel to `kept`.
struct FrameResult {
    int frame_id = 0;
    Brightness brightness;
    GlobalStats global;
    int n_detected = 0;   // after NMS and the max_features cap
    int n_described = 0;  // descriptors successfully extracted
    int n_kept = 0;       // after culling
    std::vector<Keypoint> described;  // scored set; cull_report indexes into it
    std::vector<Keypoint> kept;
    std::vector<Descriptor256> descriptors;
    std::vector<StabilityRecord> cull_report;
    StageTimings timings;
};

/// Runs the enabled stages in order: enhance, threshold map, detect,
/// describe, cull. Disabled stages substitute their baselines (raw image /
/// uniform fixed threshold / keep everything).
FrameResult run_frame(const GrayImage& img, const PipelineConfig& cfg, int frame_id = 0);

struct SweepRow {
    double threshold = 0;
    int count_raw = 0;
    int count_enhanced = 0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
};

/// Pre-NMS FAST detection counts at each uniform threshold, on the raw
/// image and on its enhanced version.
SweepReport sweep(const GrayImage& img, const std::vector<double>& thresholds,
                  const PipelineConfig& cfg);

/// Row-major 3x3 plane homography.
struct Homography {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Homography identity() { return {}; }
    static Homography translation(double tx, double ty) {
        Homography h;
        h.m[2] = tx;
        h.m[5] = ty;
        return h;
    }
    std::pair<double, double> apply(double x, double y) const {
        const double w = m[6] * x + m[7] * y + m[8];
        return {(m[0] * x + m[1] * y + m[2]) / w, (m[3] * x + m[4] * y + m[5]) / w};
    }
};

struct MatchFramesReport {
    FrameResult frame_a;
    FrameResult frame_b;
    std::vector<Match> matches;  // indices into the kept keypoint lists
    int n_matches = 0;
    double mean_hamming = 0;
    double inlier_ratio = 0;  // fraction of matches consistent with the homography
};

/// Runs the pipeline on both frames and matches the kept keypoints'
/// descriptors. Inliers are matches whose mapped position lands within
/// inlier_tol_px of the matched keypoint.
MatchFramesReport match_frames(const GrayImage& frame_a, const GrayImage& frame_b,
                               const PipelineConfig& cfg,
                               const Homography& known = Homography::identity(),
                               double inlier_tol_px = 3.0, double ratio_threshold = 0.8);

struct BenchStats {
    double mean_ms = 0;
    double p95_ms = 0;
};

struct BenchReport {
    int n_frames = 0;
    BenchStats enhance, threshold, detect, describe, cull, total;
};

/// Runs the full pipeline over the source and aggregates per-stage
/// latencies. Throws TooFewFramesError below 10 frames.
BenchReport bench(const FrameSource& source, const PipelineConfig& cfg, int threads = 1);

std::string format_bench_report(const BenchReport& report);

struct RunOptions {
    int threads = 1;
    std::optional<std::filesystem::path> debug_dump;
};

/// Full per-frame pipeline over a sequence. Writes frames.csv,
/// keypoints.csv and cull.csv (deterministic) plus timings.csv
/// (wall-clock, kept separate so golden-file comparisons stay stable)
/// into out_dir. Frames may be processed by a worker pool; records are
/// committed in frame order.
void run_sequence(const FrameSource& source, const PipelineConfig& cfg,
                  const std::filesystem::path& out_dir, const RunOptions& opts = {});

/// CSV serialization helpers (schema version "# lumen-front v1").
std::string keypoints_csv(const std::vector<FrameResult>& results);
std::string cull_csv(const std::vector<FrameResult>& results);
std::string frames_csv(const std::vector<FrameResult>& results);
std::string timings_csv(const std::vector<FrameResult>& results);
std::string sweep_csv(const SweepReport& report);
std::string matches_csv(const MatchFramesReport& report, int frame_a_id, int frame_b_id);

}  // namespace lumen
