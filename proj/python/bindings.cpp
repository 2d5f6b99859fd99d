#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>

#include "vesselfuse/assignment.hpp"
#include "vesselfuse/driver.hpp"
#include "vesselfuse/dtw.hpp"
#include "vesselfuse/geo.hpp"
#include "vesselfuse/io.hpp"
#include "vesselfuse/metrics.hpp"
#include "vesselfuse/sim.hpp"

namespace py = pybind11;
using namespace vesselfuse;

namespace {

dtw::PixelSeries to_series(const std::vector<std::pair<double, double>>& points) {
    dtw::PixelSeries s;
    s.points.reserve(points.size());
    for (const auto& [x, y] : points) s.points.push_back({x, y});
    return s;
}

assignment::CostMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r > 0 ? rows.front().size() : 0;
    assignment::CostMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

py::dict report_to_dict(const metrics::FusionReport& report) {
    py::dict d;
    const auto put = [&d](const char* key, const std::optional<double>& v) {
        d[key] = v ? py::object(py::float_(*v)) : py::object(py::none());
    };
    put("mofa", report.mofa);
    put("idp", report.idp);
    put("idr", report.idr);
    put("idf1", report.idf1);
    put("precision", report.precision);
    put("recall", report.recall);
    put("mota", report.mota);
    put("mofp", report.mofp);
    py::dict counters;
    counters["tp_id"] = report.counters.tp_id;
    counters["fp_id"] = report.counters.fp_id;
    counters["fn_id"] = report.counters.fn_id;
    counters["gt_mmsi"] = report.counters.gt_mmsi;
    counters["tp_box"] = report.counters.tp_box;
    counters["fp_box"] = report.counters.fp_box;
    counters["fn_box"] = report.counters.fn_box;
    counters["gt_boxes"] = report.counters.gt_boxes;
    counters["id_switches"] = report.counters.id_switches;
    d["counters"] = counters;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "AIS/video vessel trajectory fusion core";

    // geodesy
    m.def(
        "forward_geodetic",
        [](std::pair<double, double> lonlat, double course, double distance) {
            const auto p =
                geo::forward_geodetic({lonlat.first, lonlat.second}, course, distance);
            return std::make_pair(p.lon, p.lat);
        },
        py::arg("lonlat"), py::arg("course_deg"), py::arg("distance_m"),
        "Direct geodesic problem on WGS-84");
    m.def(
        "inverse_geodetic",
        [](std::pair<double, double> a, std::pair<double, double> b) {
            const auto cd = geo::inverse_geodetic({a.first, a.second}, {b.first, b.second});
            return std::make_pair(cd.course_deg, cd.distance_m);
        },
        py::arg("a"), py::arg("b"), "Course and distance between two points");
    m.def(
        "mercator",
        [](std::pair<double, double> p, std::pair<double, double> origin) {
            const auto en = geo::mercator({p.first, p.second}, {origin.first, origin.second});
            return std::make_pair(en.east, en.north);
        },
        py::arg("p"), py::arg("origin"), "Origin-relative spherical Mercator meters");

    // trajectory similarity
    m.def(
        "dtw_exact",
        [](const std::vector<std::pair<double, double>>& x,
           const std::vector<std::pair<double, double>>& y) {
            const auto r = dtw::dtw_exact(to_series(x), to_series(y));
            return std::make_pair(r.distance, r.path.pairs);
        },
        py::arg("x"), py::arg("y"));
    m.def(
        "fastdtw",
        [](const std::vector<std::pair<double, double>>& x,
           const std::vector<std::pair<double, double>>& y, int radius) {
            const auto r = dtw::fastdtw(to_series(x), to_series(y), radius);
            return std::make_pair(r.distance, r.path.pairs);
        },
        py::arg("x"), py::arg("y"), py::arg("radius") = 1);
    m.def(
        "direction_angle",
        [](const std::vector<std::pair<double, double>>& x,
           const std::vector<std::pair<double, double>>& y) {
            return dtw::direction_angle(to_series(x), to_series(y));
        },
        py::arg("x"), py::arg("y"));
    m.def(
        "e_fastdtw",
        [](const std::vector<std::pair<double, double>>& x,
           const std::vector<std::pair<double, double>>& y, int radius) {
            return dtw::e_fastdtw(to_series(x), to_series(y), radius);
        },
        py::arg("x"), py::arg("y"), py::arg("radius") = 1,
        "FastDTW path cost scaled by e^angle; lower is more similar");

    // assignment
    m.def(
        "solve_assignment",
        [](const std::vector<std::vector<double>>& costs) {
            return assignment::solve(to_matrix(costs));
        },
        py::arg("costs"), "Min-cost matching; +inf forbids, -inf forces");
    m.def(
        "brute_force_assignment",
        [](const std::vector<std::vector<double>>& costs) {
            return assignment::brute_force(to_matrix(costs));
        },
        py::arg("costs"));

    // metrics
    m.def("mofa", &metrics::mofa, py::arg("fn"), py::arg("fp"), py::arg("gt"));
    m.def(
        "id_scores",
        [](std::int64_t tp, std::int64_t fp, std::int64_t fn) {
            const auto s = metrics::id_scores(tp, fp, fn);
            return py::make_tuple(s.idp, s.idr, s.idf1);
        },
        py::arg("tp"), py::arg("fp"), py::arg("fn"));
    m.def("precision_recall", &metrics::precision_recall, py::arg("tp"), py::arg("fp"),
          py::arg("fn"));
    m.def("mota", &metrics::mota, py::arg("fp"), py::arg("fn"), py::arg("id_switches"),
          py::arg("gt"));
    m.def("mofp", &metrics::mofp, py::arg("distances"));

    // pipeline
    m.def("preset_names", &sim::preset_names);
    m.def(
        "simulate",
        [](const std::string& preset_or_file, const std::string& out_dir, std::uint64_t seed,
           bool force) {
            sim::Scenario scenario;
            const auto names = sim::preset_names();
            if (std::find(names.begin(), names.end(), preset_or_file) != names.end()) {
                scenario = sim::preset(preset_or_file, seed);
            } else {
                scenario = io::read_scenario_json(preset_or_file);
            }
            scenario.seed = seed;
            const auto r = driver::run_simulate(scenario, out_dir, force);
            py::dict d;
            d["ais"] = r.ais_csv;
            d["detections"] = r.detections_jsonl;
            d["gt"] = r.gt_csv;
            d["config"] = r.config_json;
            d["scenario"] = r.scenario_json;
            return d;
        },
        py::arg("scenario"), py::arg("out_dir"), py::arg("seed") = 1, py::arg("force") = false,
        "Generate the three data files for a preset name or scenario JSON path");
    m.def(
        "fuse",
        [](const std::string& ais_csv, const std::string& detections_jsonl,
           const std::string& config_json, const std::string& out_path, bool anti_occlusion) {
            config::EngineConfig cfg = io::read_config_json(config_json);
            cfg.tracker.anti_occlusion = anti_occlusion;
            const auto r = driver::run_fuse(ais_csv, detections_jsonl, cfg, out_path);
            py::dict d;
            d["ticks"] = r.timing.ticks;
            d["mean_s"] = r.timing.mean_s;
            d["std_s"] = r.timing.std_s;
            d["max_s"] = r.timing.max_s;
            return d;
        },
        py::arg("ais_csv"), py::arg("detections_jsonl"), py::arg("config_json"),
        py::arg("out_path"), py::arg("anti_occlusion") = true);
    m.def(
        "evaluate",
        [](const std::string& annotations, const std::string& gt_csv,
           const std::string& config_json, double iou) {
            std::optional<config::EngineConfig> cfg;
            if (!config_json.empty()) cfg = io::read_config_json(config_json);
            return report_to_dict(driver::run_evaluate(annotations, gt_csv, cfg, iou));
        },
        py::arg("annotations"), py::arg("gt_csv"), py::arg("config_json") = std::string(),
        py::arg("iou") = 0.5);

#ifdef VERSION_INFO
#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
