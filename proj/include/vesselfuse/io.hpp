#pragma once

#include <string>
#include <vector>

#include "vesselfuse/ais.hpp"
#include "vesselfuse/config.hpp"
#include "vesselfuse/errors.hpp"
#include "vesselfuse/fusion.hpp"
#include "vesselfuse/metrics.hpp"
#include "vesselfuse/sim.hpp"

namespace vesselfuse::io {

// AIS CSV: timestamp,mmsi,lon,lat,speed,course,heading
// timestamp is ISO-8601 or unix seconds (autodetected); heading empty or 511
// means unavailable. Rows must be time-sorted; violations raise parse_error
// naming the first offending line.
std::vector<ais::AisRecord> read_ais_csv(const std::string& path);
void write_ais_csv(const std::string& path, const std::vector<ais::AisRecord>& records);

// Detections JSONL, one tick per line:
// {"t": <sec>, "boxes": [{"tl":[x,y],"br":[x,y],"conf":c,"emb":[...]}]}
std::vector<sim::DetectionFrame> read_detections_jsonl(const std::string& path);
void write_detections_jsonl(const std::string& path, const std::vector<sim::DetectionFrame>& frames);

// Ground-truth CSV: t,mmsi,track_id,x_tl,y_tl,x_br,y_br (mmsi 0 = no AIS truth).
std::vector<metrics::GroundTruthRecord> read_gt_csv(const std::string& path);
void write_gt_csv(const std::string& path, const std::vector<sim::GroundTruthEntry>& truth);

// Annotations JSONL:
// {"t":..,"track":..,"mmsi":..,"box":[..],"ais":{..},"prov":"matched|associated|unmatched"}
void write_annotations_jsonl(const std::string& path,
                             const std::vector<fusion::FusedAnnotation>& annotations);
std::vector<metrics::PredictionRecord> read_annotations_jsonl(const std::string& path);

config::EngineConfig read_config_json(const std::string& path);
void write_config_json(const std::string& path, const config::EngineConfig& config);

sim::Scenario read_scenario_json(const std::string& path);
void write_scenario_json(const std::string& path, const sim::Scenario& scenario);

// Metric report as JSON plus a flat CSV with MOFA,IDP,IDR,IDF1 percent columns.
void write_report(const std::string& json_path, const std::string& csv_path,
                  const metrics::FusionReport& report, const std::string& label);

double parse_timestamp(const std::string& field); // ISO-8601 or unix seconds

} // namespace vesselfuse::io
