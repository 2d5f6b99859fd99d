#include "vesselfuse/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "vesselfuse/io.hpp"

namespace vesselfuse::driver {

namespace fs = std::filesystem;

config::EngineConfig config_for_scenario(const sim::Scenario& scenario) {
    config::EngineConfig cfg;
    cfg.camera = scenario.camera;
    cfg.embedding_dim = scenario.noise.embedding_dim;
    cfg.seed = scenario.seed;
    cfg.tracker.retention_s = cfg.store.retention_s;
    return cfg;
}

SimulateResult run_simulate(const sim::Scenario& scenario, const std::string& out_dir,
                            bool force) {
    if (!(scenario.duration_s > 0.0)) {
        throw std::invalid_argument("simulate: scenario duration must be > 0");
    }
    fs::create_directories(out_dir);
    SimulateResult result;
    result.ais_csv = (fs::path(out_dir) / "ais.csv").string();
    result.detections_jsonl = (fs::path(out_dir) / "detections.jsonl").string();
    result.gt_csv = (fs::path(out_dir) / "gt.csv").string();
    result.config_json = (fs::path(out_dir) / "config.json").string();
    result.scenario_json = (fs::path(out_dir) / "scenario.json").string();

    if (!force) {
        for (const std::string& path : {result.ais_csv, result.detections_jsonl, result.gt_csv,
                                        result.config_json, result.scenario_json}) {
            if (fs::exists(path)) {
                throw std::invalid_argument("simulate: refusing to overwrite " + path +
                                            " (use --force)");
            }
        }
    }

    io::write_ais_csv(result.ais_csv, sim::emit_ais(scenario));
    io::write_detections_jsonl(result.detections_jsonl, sim::emit_detections(scenario));
    io::write_gt_csv(result.gt_csv, sim::ground_truth(scenario));
    io::write_config_json(result.config_json, config_for_scenario(scenario));
    io::write_scenario_json(result.scenario_json, scenario);
    return result;
}

FuseResult run_fuse(const std::string& ais_csv, const std::string& detections_jsonl,
                    const config::EngineConfig& config, const std::string& out_path) {
    const std::vector<ais::AisRecord> ais_records = io::read_ais_csv(ais_csv);
    const std::vector<sim::DetectionFrame> frames = io::read_detections_jsonl(detections_jsonl);

    double t_begin = std::numeric_limits<double>::infinity();
    double t_end = -std::numeric_limits<double>::infinity();
    if (!ais_records.empty()) {
        t_begin = std::min(t_begin, ais_records.front().t);
        t_end = std::max(t_end, ais_records.back().t);
    }
    if (!frames.empty()) {
        t_begin = std::min(t_begin, frames.front().t);
        t_end = std::max(t_end, frames.back().t);
    }

    FuseResult result;
    fusion::Engine engine(config);
    std::vector<double> tick_times;

    if (std::isfinite(t_begin)) {
        std::size_t ais_i = 0;
        std::size_t frame_i = 0;
        const double first = std::floor(t_begin);
        const double last = std::ceil(t_end);
        for (double t = first; t <= last; t += 1.0) {
            std::vector<ais::AisRecord> ais_batch;
            while (ais_i < ais_records.size() && ais_records[ais_i].t <= t) {
                ais_batch.push_back(ais_records[ais_i++]);
            }
            std::vector<tracking::DetectionBox> det_batch;
            while (frame_i < frames.size() && frames[frame_i].t <= t) {
                for (tracking::DetectionBox det : frames[frame_i].boxes) {
                    det.t = t; // normalize into the tick window
                    det_batch.push_back(std::move(det));
                }
                ++frame_i;
            }
            const auto start = std::chrono::steady_clock::now();
            std::vector<fusion::FusedAnnotation> annotations =
                engine.tick(t, ais_batch, det_batch);
            const auto stop = std::chrono::steady_clock::now();
            tick_times.push_back(std::chrono::duration<double>(stop - start).count());
            result.annotations.insert(result.annotations.end(),
                                      std::make_move_iterator(annotations.begin()),
                                      std::make_move_iterator(annotations.end()));
        }
    }

    result.timing.ticks = tick_times.size();
    if (!tick_times.empty()) {
        double sum = 0.0;
        for (const double v : tick_times) {
            sum += v;
            result.timing.max_s = std::max(result.timing.max_s, v);
        }
        result.timing.mean_s = sum / static_cast<double>(tick_times.size());
        double var = 0.0;
        for (const double v : tick_times) {
            var += (v - result.timing.mean_s) * (v - result.timing.mean_s);
        }
        result.timing.std_s = std::sqrt(var / static_cast<double>(tick_times.size()));
    }

    if (!out_path.empty()) {
        io::write_annotations_jsonl(out_path, result.annotations);
    }
    return result;
}

metrics::FusionReport run_evaluate(const std::string& annotations_jsonl, const std::string& gt_csv,
                                   const std::optional<config::EngineConfig>& config,
                                   double iou_threshold) {
    const std::vector<metrics::PredictionRecord> preds =
        io::read_annotations_jsonl(annotations_jsonl);
    const std::vector<metrics::GroundTruthRecord> gts = io::read_gt_csv(gt_csv);

    double diagonal = 0.0;
    if (config) {
        diagonal = std::hypot(static_cast<double>(config->camera.image_width),
                              static_cast<double>(config->camera.image_height));
    } else {
        double w = 1.0;
        double h = 1.0;
        for (const auto& g : gts) {
            w = std::max(w, g.box.x_br);
            h = std::max(h, g.box.y_br);
        }
        for (const auto& p : preds) {
            w = std::max(w, p.box.x_br);
            h = std::max(h, p.box.y_br);
        }
        diagonal = std::hypot(w, h);
    }

    return metrics::build_report(metrics::evaluate_counters(preds, gts, iou_threshold, diagonal));
}

} // namespace vesselfuse::driver
