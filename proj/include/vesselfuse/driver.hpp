#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vesselfuse/config.hpp"
#include "vesselfuse/fusion.hpp"
#include "vesselfuse/metrics.hpp"
#include "vesselfuse/sim.hpp"

namespace vesselfuse::driver {

struct SimulateResult {
    std::string ais_csv;
    std::string detections_jsonl;
    std::string gt_csv;
    std::string config_json;
    std::string scenario_json;
};

// Writes the three data files plus the matching engine config into out_dir.
// Refuses to overwrite existing outputs unless force is set.
SimulateResult run_simulate(const sim::Scenario& scenario, const std::string& out_dir, bool force);

struct TimingSummary {
    std::size_t ticks = 0;
    double mean_s = 0.0;
    double std_s = 0.0;
    double max_s = 0.0;
};

struct FuseResult {
    TimingSummary timing;
    std::vector<fusion::FusedAnnotation> annotations;
};

// Replays the input streams tick by tick through the fusion engine; per-tick
// wall time excludes file I/O. Writes annotations when out_path is non-empty.
FuseResult run_fuse(const std::string& ais_csv, const std::string& detections_jsonl,
                    const config::EngineConfig& config, const std::string& out_path);

// Evaluates an annotation stream against ground truth. The image diagonal
// comes from the config camera when given, else from the data extent.
metrics::FusionReport run_evaluate(const std::string& annotations_jsonl, const std::string& gt_csv,
                                   const std::optional<config::EngineConfig>& config,
                                   double iou_threshold);

// Engine config whose camera and seed match the scenario, default operating
// point elsewhere.
config::EngineConfig config_for_scenario(const sim::Scenario& scenario);

} // namespace vesselfuse::driver
