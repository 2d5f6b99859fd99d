#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vesselfuse/driver.hpp"
#include "vesselfuse/dtw.hpp"
#include "vesselfuse/errors.hpp"
#include "vesselfuse/io.hpp"

namespace {

using vesselfuse::config::EngineConfig;
namespace fs = std::filesystem;

// Point-list CSV for the dtw verb: rows of "x,y" or "t,x,y".
vesselfuse::dtw::PixelSeries read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw vesselfuse::parse_error("cannot open " + path);
    vesselfuse::dtw::PixelSeries series;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::vector<double> vals;
        std::string field;
        bool numeric = true;
        while (std::getline(ss, field, ',')) {
            try {
                vals.push_back(std::stod(field));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (line_no == 1) continue; // header
            throw vesselfuse::parse_error("bad point row", line_no);
        }
        if (vals.size() == 2) {
            series.points.push_back({vals[0], vals[1]});
        } else if (vals.size() >= 3) {
            series.times.push_back(vals[0]);
            series.points.push_back({vals[1], vals[2]});
        } else {
            throw vesselfuse::parse_error("expected x,y or t,x,y", line_no);
        }
    }
    return series;
}

int fail(const std::string& error_class, const std::string& message, int code) {
    nlohmann::ordered_json j;
    j["error"] = error_class;
    j["message"] = message;
    std::cerr << j.dump() << std::endl;
    return code;
}

int cmd_simulate(const std::string& scenario_file, const std::string& preset,
                 const std::string& out_dir, std::optional<std::uint64_t> seed, bool force) {
    vesselfuse::sim::Scenario scenario;
    if (!scenario_file.empty()) {
        scenario = vesselfuse::io::read_scenario_json(scenario_file);
    } else {
        scenario = vesselfuse::sim::preset(preset, seed.value_or(1));
    }
    if (seed) scenario.seed = *seed;
    const auto result = vesselfuse::driver::run_simulate(scenario, out_dir, force);
    nlohmann::ordered_json j;
    j["ais"] = result.ais_csv;
    j["detections"] = result.detections_jsonl;
    j["gt"] = result.gt_csv;
    j["config"] = result.config_json;
    j["scenario"] = result.scenario_json;
    std::cout << j.dump() << std::endl;
    return 0;
}

int cmd_fuse(const std::string& ais, const std::string& detections, const std::string& config_path,
             const std::string& out, const std::string& timing_path, bool no_anti_occlusion,
             bool force) {
    EngineConfig config = vesselfuse::io::read_config_json(config_path);
    if (no_anti_occlusion) config.tracker.anti_occlusion = false;
    if (!force && !out.empty() && fs::exists(out)) {
        throw std::invalid_argument("fuse: refusing to overwrite " + out + " (use --force)");
    }
    const auto result = vesselfuse::driver::run_fuse(ais, detections, config, out);
    nlohmann::ordered_json j;
    j["ticks"] = result.timing.ticks;
    j["mean_s"] = result.timing.mean_s;
    j["std_s"] = result.timing.std_s;
    j["max_s"] = result.timing.max_s;
    j["annotations"] = out;
    std::cout << j.dump() << std::endl;
    if (!timing_path.empty()) {
        std::ofstream tf(timing_path);
        tf << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_evaluate(const std::string& annotations, const std::string& gt,
                 const std::string& config_path, const std::string& out_json,
                 const std::string& out_csv, double iou, const std::string& label) {
    std::optional<EngineConfig> config;
    if (!config_path.empty()) config = vesselfuse::io::read_config_json(config_path);
    const auto report = vesselfuse::driver::run_evaluate(annotations, gt, config, iou);
    vesselfuse::io::write_report(out_json, out_csv, report, label);
    std::ifstream echo(out_json);
    std::cout << echo.rdbuf();
    return 0;
}

int cmd_dtw(const std::string& a_path, const std::string& b_path, int radius, bool oracle_check) {
    const auto a = read_points_csv(a_path);
    const auto b = read_points_csv(b_path);
    const auto result = vesselfuse::dtw::fastdtw(a, b, radius);
    const double phi = vesselfuse::dtw::direction_angle(a, b);
    nlohmann::ordered_json j;
    j["distance"] = result.distance;
    j["phi"] = phi;
    j["similarity"] = result.distance * std::exp(phi);
    j["path"] = nlohmann::ordered_json::array();
    for (const auto& [p, q] : result.path.pairs) j["path"].push_back({p, q});
    if (oracle_check) {
        const auto exact = vesselfuse::dtw::dtw_exact(a, b);
        j["exact_distance"] = exact.distance;
        j["within_bound"] = result.distance >= exact.distance - 1e-9;
    }
    std::cout << j.dump() << std::endl;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"AIS/video vessel trajectory fusion engine"};
    app.require_subcommand(1);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Generate AIS, detection and truth files");
    std::string scenario_file, preset_name = "crossing_pair", out_dir = "out";
    std::optional<std::uint64_t> seed;
    bool force = false;
    sim_cmd->add_option("--scenario", scenario_file, "Scenario JSON file");
    sim_cmd->add_option("--preset", preset_name, "Canonical scenario name");
    sim_cmd->add_option("--out", out_dir, "Output directory");
    sim_cmd->add_option("--seed", seed, "Seed override");
    sim_cmd->add_flag("--force", force, "Overwrite existing outputs");

    // fuse
    auto* fuse_cmd = app.add_subcommand("fuse", "Replay inputs through the fusion engine");
    std::string ais_path, det_path, config_path, fuse_out = "annotations.jsonl", timing_path;
    bool no_anti_occlusion = false, fuse_force = false;
    fuse_cmd->add_option("--ais", ais_path, "AIS CSV input")->required();
    fuse_cmd->add_option("--detections", det_path, "Detections JSONL input")->required();
    fuse_cmd->add_option("--config", config_path, "Engine config JSON")->required();
    fuse_cmd->add_option("--out", fuse_out, "Annotations JSONL output");
    fuse_cmd->add_option("--timing", timing_path, "Write tick timing JSON here");
    fuse_cmd->add_flag("--no-anti-occlusion", no_anti_occlusion,
                       "Disable the anti-occlusion strategy");
    fuse_cmd->add_flag("--force", fuse_force, "Overwrite existing outputs");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Score annotations against ground truth");
    std::string ann_path, gt_path, eval_config, out_json = "report.json", out_csv = "report.csv",
                label = "clip";
    double iou = 0.5;
    eval_cmd->add_option("--annotations", ann_path, "Annotations JSONL")->required();
    eval_cmd->add_option("--gt", gt_path, "Ground-truth CSV")->required();
    eval_cmd->add_option("--config", eval_config, "Engine config JSON (image size)");
    eval_cmd->add_option("--out-json", out_json, "Report JSON output");
    eval_cmd->add_option("--out-csv", out_csv, "Report CSV output");
    eval_cmd->add_option("--iou", iou, "Box match IoU threshold");
    eval_cmd->add_option("--label", label, "Row label for the CSV");

    // dtw
    auto* dtw_cmd = app.add_subcommand("dtw", "Score two trajectories");
    std::string a_path, b_path;
    int radius = 1;
    bool oracle_check = false;
    dtw_cmd->add_option("--a", a_path, "First point CSV")->required();
    dtw_cmd->add_option("--b", b_path, "Second point CSV")->required();
    dtw_cmd->add_option("--radius", radius, "Search radius");
    dtw_cmd->add_flag("--oracle-check", oracle_check, "Also run the exact solver");

    try {
        app.parse(argc, argv);
        if (sim_cmd->parsed()) {
            return cmd_simulate(scenario_file, preset_name, out_dir, seed, force);
        }
        if (fuse_cmd->parsed()) {
            return cmd_fuse(ais_path, det_path, config_path, fuse_out, timing_path,
                            no_anti_occlusion, fuse_force);
        }
        if (eval_cmd->parsed()) {
            return cmd_evaluate(ann_path, gt_path, eval_config, out_json, out_csv, iou, label);
        }
        if (dtw_cmd->parsed()) {
            return cmd_dtw(a_path, b_path, radius, oracle_check);
        }
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cout << app.help() << std::endl;
        return fail("usage", e.what(), 2);
    } catch (const vesselfuse::parse_error& e) {
        return fail("parse", e.what(), 3);
    } catch (const std::invalid_argument& e) {
        return fail("validation", e.what(), 4);
    } catch (const vesselfuse::domain_error& e) {
        return fail("domain", e.what(), 4);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 5);
    }
    return 0;
}
