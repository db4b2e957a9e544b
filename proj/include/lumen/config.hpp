#pragma once

#include <filesystem>
#include <string>

#include "lumen/cull.hpp"
#include "lumen/detect.hpp"
#include "lumen/enhance.hpp"
#include "lumen/threshold.hpp"

namespace lumen {

/// Per-stage on/off switches plus the baselines substituted when a stage
/// is disabled: the raw image for enhancement, one uniform threshold for
/// the adaptive map, and no culling.
struct StageToggles {
    bool enhance = true;
    bool adaptive_threshold = true;
    bool cull = true;
    double fixed_threshold = 20.0;
};

/// Every tunable of the front-end, grouped by stage.
struct PipelineConfig {
    EnhancementConfig enhancement;
    ThresholdConfig threshold;
    DetectorConfig detector;
    CullConfig cull;
    StageToggles stages;

    void validate() const;
};

/// Parses the INI-style config text: [section] headers matching the four
/// stage configs plus [stages]; `key = value` entries; '#' and ';'
/// comments. Unknown sections or keys are hard errors so experiment typos
/// surface immediately.
PipelineConfig parse_config(const std::string& text);

PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace lumen
