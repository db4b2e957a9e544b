#include "lumen/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "lumen/errors.hpp"
#include "lumen/io.hpp"

namespace lumen {

namespace {

constexpr const char* kCsvVersion = "# lumen-front v1\n";

std::string strfmt(const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

std::string format_angle(double angle) {
    return angle == angle ? strfmt("%.6f", angle) : "nan";
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Intermediates a caller may want dumped for debugging.
struct FrameArtifacts {
    std::optional<EnhancedFrame> enhanced;
    std::optional<ThresholdMap> tmap;
};

FrameResult run_frame_impl(const GrayImage& img, const PipelineConfig& cfg, int frame_id,
                           FrameArtifacts* artifacts) {
    FrameResult result;
    result.frame_id = frame_id;
    const auto frame_start = Clock::now();

    // Stage 1: enhancement (or the raw image).
    auto stage_start = Clock::now();
    std::optional<EnhancedFrame> enhanced;
    if (cfg.stages.enhance) {
        enhanced = enhance(img, cfg.enhancement);
        result.brightness = enhanced->brightness;
    } else {
        result.brightness = classify_brightness(img, cfg.enhancement);
    }
    const GrayImage& input = enhanced ? enhanced->output : img;
    result.timings.enhance_ms = ms_since(stage_start);

    // Stage 2: threshold map (or one uniform threshold).
    stage_start = Clock::now();
    ThresholdMap tmap =
        cfg.stages.adaptive_threshold
            ? threshold_map(input, cfg.threshold)
            : ThresholdMap::uniform(input.width(), input.height(), cfg.threshold.subregion_size,
                                    cfg.stages.fixed_threshold);
    result.global = tmap.global;
    result.timings.threshold_ms = ms_since(stage_start);

    // Stage 3: detection over the pyramid.
    stage_start = Clock::now();
    const Pyramid pyramid = build_pyramid(input, cfg.detector);
    std::vector<Keypoint> detected = detect(pyramid, tmap, cfg.detector);
    result.n_detected = static_cast<int>(detected.size());
    result.timings.detect_ms = ms_since(stage_start);

    // Stage 4: orientation + descriptors. Keypoints whose patch does not
    // fit are skipped here and excluded from the frame's keypoint set.
    stage_start = Clock::now();
    std::vector<Keypoint> described;
    std::vector<Descriptor256> descriptors;
    described.reserve(detected.size());
    descriptors.reserve(detected.size());
    for (Keypoint kp : detected) {
        const GrayImage& level_img = pyramid.levels[kp.octave];
        const double scale = pyramid.scales[kp.octave];
        const int lx = static_cast<int>(std::lround(kp.x / scale));
        const int ly = static_cast<int>(std::lround(kp.y / scale));
        if (!can_describe(level_img, lx, ly)) continue;
        kp.angle = orientation(level_img, lx, ly);
        Descriptor256 desc = describe(level_img, lx, ly, kp.angle);
        desc.keypoint_index = static_cast<int>(described.size());
        described.push_back(kp);
        descriptors.push_back(desc);
    }
    result.n_described = static_cast<int>(described.size());
    result.timings.describe_ms = ms_since(stage_start);
    result.described = described;

    // Stage 5: culling (contrast read from the detector's input image).
    stage_start = Clock::now();
    if (cfg.stages.cull && !described.empty()) {
        CullResult culled = cull(described, input, cfg.cull);
        result.cull_report = std::move(culled.report);
        result.kept = std::move(culled.kept);
        result.descriptors.reserve(culled.kept_indices.size());
        for (std::size_t i = 0; i < culled.kept_indices.size(); ++i) {
            Descriptor256 desc = descriptors[culled.kept_indices[i]];
            desc.keypoint_index = static_cast<int>(i);
            result.descriptors.push_back(desc);
        }
    } else {
        result.kept = std::move(described);
        result.descriptors = std::move(descriptors);
    }
    result.n_kept = static_cast<int>(result.kept.size());
    result.timings.cull_ms = ms_since(stage_start);

    result.timings.total_ms = ms_since(frame_start);
    if (artifacts) {
        artifacts->enhanced = std::move(enhanced);
        artifacts->tmap = std::move(tmap);
    }
    return result;
}

void dump_artifacts(const std::filesystem::path& dir, int frame_id, const FrameArtifacts& artifacts) {
    std::filesystem::create_directories(dir);
    const std::string prefix = strfmt("%06d", frame_id);
    if (artifacts.enhanced) {
        const EnhancedFrame& ef = *artifacts.enhanced;
        save_image(ef.blurred, dir / (prefix + "_blurred.png"));
        save_image(ef.gamma_corrected, dir / (prefix + "_gamma.png"));
        save_image(ef.output, dir / (prefix + "_enhanced.png"));
        // The signed mask is visualized biased around mid-gray.
        GrayImage mask_vis(ef.mask.width(), ef.mask.height());
        for (int y = 0; y < ef.mask.height(); ++y)
            for (int x = 0; x < ef.mask.width(); ++x)
                mask_vis.at(x, y) = quantize_u8(128.0 + ef.mask.at(x, y));
        save_image(mask_vis, dir / (prefix + "_mask.png"));
    }
    if (artifacts.tmap) {
        std::ofstream out(dir / (prefix + "_tmap.json"));
        out << threshold_map_json(*artifacts.tmap);
    }
}

void append_keypoints_rows(std::string& out, const FrameResult& r) {
    for (const Keypoint& kp : r.kept) {
        out += strfmt("%d,%.3f,%.3f,%d,%d,", r.frame_id, kp.x, kp.y, kp.octave, kp.response);
        out += format_angle(kp.angle);
        out += '\n';
    }
}

void append_cull_rows(std::string& out, const FrameResult& r) {
    for (const StabilityRecord& rec : r.cull_report) {
        const Keypoint& kp = r.described[rec.kp_index];
        out += strfmt("%d,%d,%.3f,%.3f,%.2f,%.9g,%.6f,%.9g,%.9g,%d\n", r.frame_id, rec.kp_index,
                      kp.x, kp.y, rec.leaf_area, rec.density, rec.h_c, rec.c_light, rec.score,
                      rec.culled ? 1 : 0);
    }
}

void append_frames_row(std::string& out, const FrameResult& r) {
    out += strfmt("%d,%s,%.3f,%.6f,%.6f,%.6f,%.6f,%d,%d,%d\n", r.frame_id,
                  to_string(r.brightness.cls), r.brightness.mean, r.brightness.deviation,
                  r.global.entropy, r.global.mean_gradient, r.global.global_threshold,
                  r.n_detected, r.n_described, r.n_kept);
}

void append_timings_row(std::string& out, const FrameResult& r) {
    out += strfmt("%d,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f\n", r.frame_id, r.timings.enhance_ms,
                  r.timings.threshold_ms, r.timings.detect_ms, r.timings.describe_ms,
                  r.timings.cull_ms, r.timings.total_ms);
}

constexpr const char* kKeypointsHeader = "frame_id,x,y,octave,response,angle\n";
constexpr const char* kCullHeader =
    "frame_id,kp_index,x,y,leaf_area,density,h_c,c_light,score,culled\n";
constexpr const char* kFramesHeader =
    "frame_id,brightness,mean_intensity,deviation,entropy,mean_gradient,global_threshold,"
    "n_detected,n_described,n_kept\n";
constexpr const char* kTimingsHeader =
    "frame_id,enhance_ms,threshold_ms,detect_ms,describe_ms,cull_ms,total_ms\n";

}  // namespace

SourceKind parse_source_kind(const std::string& name) {
    if (name == "euroc") return SourceKind::Euroc;
    if (name == "tumvi") return SourceKind::TumVi;
    if (name == "plain") return SourceKind::Plain;
    throw ConfigError("unknown dataset kind '" + name + "' (expected euroc, tumvi or plain)");
}

FrameSource load_sequence(const std::filesystem::path& dir, SourceKind kind) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw MissingDirectoryError("dataset directory '" + dir.string() + "' does not exist");

    FrameSource source;
    source.kind = kind;

    if (kind == SourceKind::Plain) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            const auto ext = entry.path().extension().string();
            if (ext == ".png" || ext == ".pgm") source.frames.push_back({0, entry.path()});
        }
        std::sort(source.frames.begin(), source.frames.end(),
                  [](const auto& a, const auto& b) { return a.path.filename() < b.path.filename(); });
        for (std::size_t i = 0; i < source.frames.size(); ++i)
            source.frames[i].timestamp_ns = static_cast<std::int64_t>(i);
        return source;
    }

    // euroc and tumvi both use the ASL layout: mav0/cam0/data.csv + data/.
    const fs::path index = dir / "mav0" / "cam0" / "data.csv";
    const fs::path image_dir = dir / "mav0" / "cam0" / "data";
    if (!fs::exists(index))
        throw MissingIndexError("dataset index '" + index.string() + "' does not exist");

    std::ifstream in(index);
    if (!in) throw MissingIndexError("cannot open dataset index '" + index.string() + "'");

    std::string line;
    int line_no = 0;
    std::int64_t prev_ts = 0;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty() || line.front() == '#') continue;

        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw MalformedIndexError(index.string() + ":" + std::to_string(line_no) +
                                      ": expected 'timestamp,filename'");
        std::int64_t ts = 0;
        try {
            std::size_t pos = 0;
            ts = std::stoll(line.substr(0, comma), &pos);
            if (pos != comma) throw std::invalid_argument(line);
        } catch (const std::exception&) {
            throw MalformedIndexError(index.string() + ":" + std::to_string(line_no) +
                                      ": timestamp is not an integer");
        }
        const std::string filename = line.substr(comma + 1);
        if (filename.empty())
            throw MalformedIndexError(index.string() + ":" + std::to_string(line_no) +
                                      ": missing image filename");
        if (!source.frames.empty() && ts <= prev_ts)
            throw MalformedIndexError(index.string() + ":" + std::to_string(line_no) +
                                      ": timestamps not strictly increasing");
        prev_ts = ts;

        fs::path image = image_dir / filename;
        if (!fs::exists(image))
            throw UnreadableImageError("image '" + image.string() + "' listed in index does not exist");
        source.frames.push_back({ts, std::move(image)});
    }
    return source;
}

FrameResult run_frame(const GrayImage& img, const PipelineConfig& cfg, int frame_id) {
    return run_frame_impl(img, cfg, frame_id, nullptr);
}

SweepReport sweep(const GrayImage& img, const std::vector<double>& thresholds,
                  const PipelineConfig& cfg) {
    if (thresholds.empty()) throw ConfigError("sweep: threshold list must be non-empty");
    for (double t : thresholds)
        if (t < 1) throw ConfigError("sweep: thresholds must be >= 1");

    const EnhancedFrame enhanced = enhance(img, cfg.enhancement);
    SweepReport report;
    report.rows.reserve(thresholds.size());
    for (double t : thresholds) {
        SweepRow row;
        row.threshold = t;
        row.count_raw = static_cast<int>(fast_corners(img, t).size());
        row.count_enhanced = static_cast<int>(fast_corners(enhanced.output, t).size());
        report.rows.push_back(row);
    }
    return report;
}

MatchFramesReport match_frames(const GrayImage& frame_a, const GrayImage& frame_b,
                               const PipelineConfig& cfg, const Homography& known,
                               double inlier_tol_px, double ratio_threshold) {
    MatchFramesReport report;
    report.frame_a = run_frame(frame_a, cfg, 0);
    report.frame_b = run_frame(frame_b, cfg, 1);

    if (report.frame_a.descriptors.empty() || report.frame_b.descriptors.empty()) return report;

    report.matches =
        match_descriptors(report.frame_a.descriptors, report.frame_b.descriptors, ratio_threshold);
    report.n_matches = static_cast<int>(report.matches.size());
    if (report.matches.empty()) return report;

    double hamming_sum = 0;
    int inliers = 0;
    for (const Match& m : report.matches) {
        hamming_sum += m.hamming;
        const Keypoint& a = report.frame_a.kept[m.index_a];
        const Keypoint& b = report.frame_b.kept[m.index_b];
        const auto [mx, my] = known.apply(a.x, a.y);
        const double dx = mx - b.x;
        const double dy = my - b.y;
        if (std::sqrt(dx * dx + dy * dy) <= inlier_tol_px) ++inliers;
    }
    report.mean_hamming = hamming_sum / report.n_matches;
    report.inlier_ratio = static_cast<double>(inliers) / report.n_matches;
    return report;
}

namespace {

/// Runs fn(frame_index) over [0, n) on a small worker pool. Exceptions are
/// reported for the lowest failing frame index to keep behavior stable
/// across thread counts.
void parallel_frames(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex mu;
    int first_error_frame = -1;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                {
                    std::lock_guard lock(mu);
                    if (first_error_frame >= 0 && i > first_error_frame) return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (first_error_frame < 0 || i < first_error_frame) {
                        first_error_frame = i;
                        first_error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

[[noreturn]] void rethrow_with_frame(int frame_id, const std::filesystem::path& path) {
    try {
        throw;
    } catch (const Error& e) {
        throw Error("frame " + std::to_string(frame_id) + " ('" + path.string() + "'): " + e.what());
    }
}

}  // namespace

BenchReport bench(const FrameSource& source, const PipelineConfig& cfg, int threads) {
    const int n = static_cast<int>(source.frames.size());
    if (n < 10)
        throw TooFewFramesError("bench needs at least 10 frames, got " + std::to_string(n));

    std::vector<StageTimings> timings(n);
    parallel_frames(n, threads, [&](int i) {
        try {
            const GrayImage img = load_image(source.frames[i].path);
            timings[i] = run_frame(img, cfg, i).timings;
        } catch (const Error&) {
            rethrow_with_frame(i, source.frames[i].path);
        }
    });

    auto stats = [&](auto member) {
        std::vector<double> values(n);
        for (int i = 0; i < n; ++i) values[i] = timings[i].*member;
        std::sort(values.begin(), values.end());
        double sum = 0;
        for (double v : values) sum += v;
        const std::size_t p95_index =
            static_cast<std::size_t>(std::ceil(0.95 * values.size())) - 1;
        return BenchStats{sum / values.size(), values[p95_index]};
    };

    BenchReport report;
    report.n_frames = n;
    report.enhance = stats(&StageTimings::enhance_ms);
    report.threshold = stats(&StageTimings::threshold_ms);
    report.detect = stats(&StageTimings::detect_ms);
    report.describe = stats(&StageTimings::describe_ms);
    report.cull = stats(&StageTimings::cull_ms);
    report.total = stats(&StageTimings::total_ms);
    return report;
}

std::string format_bench_report(const BenchReport& report) {
    std::string out;
    out += strfmt("frames: %d\n", report.n_frames);
    out += strfmt("%-10s %10s %10s\n", "stage", "mean_ms", "p95_ms");
    const std::pair<const char*, const BenchStats*> rows[] = {
        {"enhance", &report.enhance}, {"threshold", &report.threshold},
        {"detect", &report.detect},   {"describe", &report.describe},
        {"cull", &report.cull},       {"total", &report.total},
    };
    for (const auto& [name, stats] : rows)
        out += strfmt("%-10s %10.3f %10.3f\n", name, stats->mean_ms, stats->p95_ms);
    return out;
}

void run_sequence(const FrameSource& source, const PipelineConfig& cfg,
                  const std::filesystem::path& out_dir, const RunOptions& opts) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    std::ofstream keypoints_out(out_dir / "keypoints.csv", std::ios::binary);
    std::ofstream cull_out(out_dir / "cull.csv", std::ios::binary);
    std::ofstream frames_out(out_dir / "frames.csv", std::ios::binary);
    std::ofstream timings_out(out_dir / "timings.csv", std::ios::binary);
    if (!keypoints_out || !cull_out || !frames_out || !timings_out)
        throw IoError("cannot create output files in '" + out_dir.string() + "'");
    keypoints_out << kCsvVersion << kKeypointsHeader;
    cull_out << kCsvVersion << kCullHeader;
    frames_out << kCsvVersion << kFramesHeader;
    timings_out << kCsvVersion << kTimingsHeader;

    const int n = static_cast<int>(source.frames.size());
    const int threads = std::max(1, opts.threads);

    // Workers drop finished frames into a reorder buffer; the committer
    // below writes records strictly in frame order.
    std::mutex mu;
    std::condition_variable cv;
    std::map<int, FrameResult> pending;
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    int first_error_frame = n;
    std::atomic<bool> cancel{false};

    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n || cancel.load()) return;
            try {
                FrameArtifacts artifacts;
                FrameArtifacts* sink = opts.debug_dump ? &artifacts : nullptr;
                const GrayImage img = load_image(source.frames[i].path);
                FrameResult result = run_frame_impl(img, cfg, i, sink);
                if (opts.debug_dump) dump_artifacts(*opts.debug_dump, i, artifacts);
                std::lock_guard lock(mu);
                pending.emplace(i, std::move(result));
                cv.notify_all();
            } catch (const Error&) {
                std::lock_guard lock(mu);
                if (i < first_error_frame) {
                    first_error_frame = i;
                    try {
                        rethrow_with_frame(i, source.frames[i].path);
                    } catch (...) {
                        first_error = std::current_exception();
                    }
                }
                cancel.store(true);
                cv.notify_all();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);

    std::string kp_buf, cull_buf, frames_buf, timings_buf;
    for (int commit = 0; commit < n; ++commit) {
        FrameResult result;
        {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return pending.contains(commit) || cancel.load(); });
            if (cancel.load() && !pending.contains(commit)) break;
            result = std::move(pending.at(commit));
            pending.erase(commit);
        }
        kp_buf.clear();
        cull_buf.clear();
        frames_buf.clear();
        timings_buf.clear();
        append_keypoints_rows(kp_buf, result);
        append_cull_rows(cull_buf, result);
        append_frames_row(frames_buf, result);
        append_timings_row(timings_buf, result);
        keypoints_out << kp_buf;
        cull_out << cull_buf;
        frames_out << frames_buf;
        timings_out << timings_buf;
    }

    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string keypoints_csv(const std::vector<FrameResult>& results) {
    std::string out = kCsvVersion;
    out += kKeypointsHeader;
    for (const auto& r : results) append_keypoints_rows(out, r);
    return out;
}

std::string cull_csv(const std::vector<FrameResult>& results) {
    std::string out = kCsvVersion;
    out += kCullHeader;
    for (const auto& r : results) append_cull_rows(out, r);
    return out;
}

std::string frames_csv(const std::vector<FrameResult>& results) {
    std::string out = kCsvVersion;
    out += kFramesHeader;
    for (const auto& r : results) append_frames_row(out, r);
    return out;
}

std::string timings_csv(const std::vector<FrameResult>& results) {
    std::string out = kCsvVersion;
    out += kTimingsHeader;
    for (const auto& r : results) append_timings_row(out, r);
    return out;
}

std::string sweep_csv(const SweepReport& report) {
    std::string out = kCsvVersion;
    out += "threshold,count_raw,count_enhanced\n";
    for (const SweepRow& row : report.rows)
        out += strfmt("%g,%d,%d\n", row.threshold, row.count_raw, row.count_enhanced);
    return out;
}

std::string matches_csv(const MatchFramesReport& report, int frame_a_id, int frame_b_id) {
    std::string out = kCsvVersion;
    out += "frame_a,frame_b,idx_a,idx_b,hamming,ratio\n";
    for (const Match& m : report.matches)
        out += strfmt("%d,%d,%d,%d,%d,%.6f\n", frame_a_id, frame_b_id, m.index_a, m.index_b,
                      m.hamming, m.ratio);
    return out;
}

}  // namespace lumen
