#include "vesselfuse/io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace vesselfuse::io {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open for reading: " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot open for writing: " + path);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double to_double(const std::string& s, long line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw parse_error("trailing characters in number", line);
        return v;
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception&) {
        throw parse_error("bad numeric field '" + s + "'", line);
    }
}

std::string fmt(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

ordered_json camera_to_json(const geo::CameraModel& cam) {
    ordered_json j;
    for (int r = 0; r < 3; ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < 3; ++c) row.push_back(cam.k_in(r, c));
        j["k_in"].push_back(row);
    }
    for (int r = 0; r < 3; ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < 4; ++c) row.push_back(cam.k_ex(r, c));
        j["k_ex"].push_back(row);
    }
    j["image_width"] = cam.image_width;
    j["image_height"] = cam.image_height;
    j["camera_geo"] = {{"lon", cam.camera_geo.lon}, {"lat", cam.camera_geo.lat}};
    j["mercator_origin"] = {{"lon", cam.mercator_origin.lon}, {"lat", cam.mercator_origin.lat}};
    j["camera_height_m"] = cam.camera_height_m;
    return j;
}

geo::CameraModel camera_from_json(const ordered_json& j) {
    geo::CameraModel cam;
    const auto& kin = j.at("k_in");
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) cam.k_in(r, c) = kin.at(r).at(c).get<double>();
    }
    if (j.contains("k_ex")) {
        const auto& kex = j.at("k_ex");
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 4; ++c) cam.k_ex(r, c) = kex.at(r).at(c).get<double>();
        }
    }
    cam.image_width = j.at("image_width").get<int>();
    cam.image_height = j.at("image_height").get<int>();
    cam.camera_geo = {j.at("camera_geo").at("lon").get<double>(),
                      j.at("camera_geo").at("lat").get<double>()};
    cam.mercator_origin = j.contains("mercator_origin")
                              ? geo::GeoPoint{j.at("mercator_origin").at("lon").get<double>(),
                                              j.at("mercator_origin").at("lat").get<double>()}
                              : cam.camera_geo;
    cam.camera_height_m = j.value("camera_height_m", 0.0);
    return cam;
}

} // namespace

double parse_timestamp(const std::string& field) {
    if (field.find('-') != std::string::npos || field.find(':') != std::string::npos) {
        std::tm tm{};
        std::istringstream ss(field);
        ss >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%S");
        if (ss.fail()) {
            std::istringstream ss2(field);
            ss2 >> std::get_time(&tm, "%Y-%m-%d %H:%M:%S");
            if (ss2.fail()) throw parse_error("bad timestamp '" + field + "'");
        }
        return static_cast<double>(timegm(&tm));
    }
    return std::stod(field);
}

std::vector<ais::AisRecord> read_ais_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<ais::AisRecord> records;
    std::string line;
    long line_no = 0;
    double last_t = -std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.find("timestamp") != std::string::npos) continue; // header
        const std::vector<std::string> f = split_csv(line);
        if (f.size() < 7) throw parse_error("expected 7 fields, got " + std::to_string(f.size()),
                                            line_no);
        ais::AisRecord r;
        try {
            r.t = parse_timestamp(f[0]);
        } catch (const parse_error& e) {
            throw parse_error(e.what(), line_no);
        }
        r.mmsi = static_cast<std::int64_t>(to_double(f[1], line_no));
        r.pos = {to_double(f[2], line_no), to_double(f[3], line_no)};
        r.sog_kn = to_double(f[4], line_no);
        r.cog_deg = to_double(f[5], line_no);
        if (!f[6].empty()) {
            const double h = to_double(f[6], line_no);
            if (h != 511.0) r.heading_deg = h;
        }
        if (r.t < last_t) throw parse_error("timestamps not sorted", line_no);
        last_t = r.t;
        records.push_back(r);
    }
    return records;
}

void write_ais_csv(const std::string& path, const std::vector<ais::AisRecord>& records) {
    std::ofstream out = open_out(path);
    out << "timestamp,mmsi,lon,lat,speed,course,heading\n";
    for (const ais::AisRecord& r : records) {
        out << fmt(r.t, 3) << ',' << r.mmsi << ',' << fmt(r.pos.lon, 9) << ',' << fmt(r.pos.lat, 9)
            << ',' << fmt(r.sog_kn, 3) << ',' << fmt(r.cog_deg, 3) << ','
            << (r.heading_deg ? fmt(*r.heading_deg, 3) : std::string("511")) << '\n';
    }
}

std::vector<sim::DetectionFrame> read_detections_jsonl(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<sim::DetectionFrame> frames;
    std::string line;
    long line_no = 0;
    double last_t = -std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const std::exception& e) {
            throw parse_error(std::string("bad JSON: ") + e.what(), line_no);
        }
        sim::DetectionFrame frame;
        frame.t = j.at("t").get<double>();
        if (frame.t < last_t) throw parse_error("ticks not sorted", line_no);
        last_t = frame.t;
        for (const auto& b : j.at("boxes")) {
            tracking::DetectionBox det;
            det.t = frame.t;
            det.box = tracking::Rect{b.at("tl").at(0).get<double>(), b.at("tl").at(1).get<double>(),
                                     b.at("br").at(0).get<double>(), b.at("br").at(1).get<double>()};
            det.confidence = b.value("conf", 1.0);
            if (b.contains("emb")) det.embedding = b.at("emb").get<std::vector<double>>();
            frame.boxes.push_back(std::move(det));
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

void write_detections_jsonl(const std::string& path,
                            const std::vector<sim::DetectionFrame>& frames) {
    std::ofstream out = open_out(path);
    for (const sim::DetectionFrame& frame : frames) {
        ordered_json j;
        j["t"] = frame.t;
        j["boxes"] = ordered_json::array();
        for (const tracking::DetectionBox& det : frame.boxes) {
            ordered_json b;
            b["tl"] = {det.box.x_tl, det.box.y_tl};
            b["br"] = {det.box.x_br, det.box.y_br};
            b["conf"] = det.confidence;
            if (!det.embedding.empty()) b["emb"] = det.embedding;
            j["boxes"].push_back(std::move(b));
        }
        out << j.dump() << '\n';
    }
}

std::vector<metrics::GroundTruthRecord> read_gt_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<metrics::GroundTruthRecord> records;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.find("track_id") != std::string::npos) continue;
        const std::vector<std::string> f = split_csv(line);
        if (f.size() < 7) throw parse_error("expected 7 fields", line_no);
        metrics::GroundTruthRecord r;
        r.t = to_double(f[0], line_no);
        r.mmsi = static_cast<std::int64_t>(to_double(f[1], line_no));
        r.track_id = static_cast<int>(to_double(f[2], line_no));
        r.box = tracking::Rect{to_double(f[3], line_no), to_double(f[4], line_no),
                               to_double(f[5], line_no), to_double(f[6], line_no)};
        records.push_back(r);
    }
    return records;
}

void write_gt_csv(const std::string& path, const std::vector<sim::GroundTruthEntry>& truth) {
    std::ofstream out = open_out(path);
    out << "t,mmsi,track_id,x_tl,y_tl,x_br,y_br\n";
    for (const sim::GroundTruthEntry& e : truth) {
        if (!e.in_view) continue;
        out << fmt(e.t, 3) << ',' << e.mmsi << ',' << e.track_id << ',' << fmt(e.box.x_tl, 3)
            << ',' << fmt(e.box.y_tl, 3) << ',' << fmt(e.box.x_br, 3) << ',' << fmt(e.box.y_br, 3)
            << '\n';
    }
}

void write_annotations_jsonl(const std::string& path,
                             const std::vector<fusion::FusedAnnotation>& annotations) {
    std::ofstream out = open_out(path);
    for (const fusion::FusedAnnotation& a : annotations) {
        ordered_json j;
        j["t"] = a.t;
        j["track"] = a.track_id;
        if (a.mmsi) j["mmsi"] = *a.mmsi;
        j["box"] = {a.box.x_tl, a.box.y_tl, a.box.x_br, a.box.y_br};
        if (a.box_predicted) j["pred"] = true;
        if (a.ais) {
            ordered_json s;
            s["lon"] = a.ais->lon;
            s["lat"] = a.ais->lat;
            s["sog"] = a.ais->sog_kn;
            s["cog"] = a.ais->cog_deg;
            if (a.ais->heading_deg) s["heading"] = *a.ais->heading_deg;
            j["ais"] = std::move(s);
        }
        switch (a.provenance) {
            case fusion::Provenance::matched: j["prov"] = "matched"; break;
            case fusion::Provenance::associated: j["prov"] = "associated"; break;
            case fusion::Provenance::unmatched: j["prov"] = "unmatched"; break;
        }
        out << j.dump() << '\n';
    }
}

std::vector<metrics::PredictionRecord> read_annotations_jsonl(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<metrics::PredictionRecord> records;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const std::exception& e) {
            throw parse_error(std::string("bad JSON: ") + e.what(), line_no);
        }
        metrics::PredictionRecord r;
        r.t = j.at("t").get<double>();
        r.track_id = j.at("track").get<int>();
        if (j.contains("mmsi")) r.mmsi = j.at("mmsi").get<std::int64_t>();
        r.box = tracking::Rect{j.at("box").at(0).get<double>(), j.at("box").at(1).get<double>(),
                               j.at("box").at(2).get<double>(), j.at("box").at(3).get<double>()};
        records.push_back(r);
    }
    return records;
}

config::EngineConfig read_config_json(const std::string& path) {
    std::ifstream in = open_in(path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw parse_error(std::string("bad config JSON: ") + e.what());
    }
    config::EngineConfig cfg;
    cfg.camera = camera_from_json(j.at("camera"));
    cfg.store.clean.region_radius_m = j.value("region_radius_m", 3704.0);
    cfg.store.clean.max_sog_kn = j.value("max_sog_kn", 50.0);
    cfg.store.retention_s = j.value("retention_s", 120.0);
    cfg.tracker.omega = j.value("omega", 0.0);
    cfg.tracker.delta_s = j.value("delta_s", 5);
    cfg.tracker.lambda = j.value("lambda", 0.5);
    cfg.tracker.gate = j.value("gate", 9.4877);
    cfg.tracker.n_init = j.value("n_init", 2);
    cfg.tracker.max_age = j.value("track_max_age", 5);
    cfg.tracker.retention_s = cfg.store.retention_s;
    cfg.tracker.ema_alpha = j.value("ema_alpha", 0.9);
    cfg.tracker.anti_occlusion = j.value("anti_occlusion", true);
    cfg.tracker.anchor_bottom_center = j.value("anchor", std::string("bottom_center")) !=
                                       std::string("centroid");
    cfg.d_max_px = j.contains("d_max_px") && !j.at("d_max_px").is_null()
                       ? j.at("d_max_px").get<double>()
                       : -1.0;
    cfg.mat_min = j.value("mat_min", 15);
    cfg.t_max_s = j.value("t_max_s", 15.0);
    cfg.fastdtw_radius = j.value("fastdtw_radius", 1);
    cfg.normalize_dtw = j.value("normalize_dtw", false);
    cfg.embedding_dim = j.value("embedding_dim", 128);
    cfg.seed = j.value("seed", 0ULL);
    return cfg;
}

void write_config_json(const std::string& path, const config::EngineConfig& cfg) {
    ordered_json j;
    j["camera"] = camera_to_json(cfg.camera);
    j["region_radius_m"] = cfg.store.clean.region_radius_m;
    j["max_sog_kn"] = cfg.store.clean.max_sog_kn;
    j["retention_s"] = cfg.store.retention_s;
    j["omega"] = cfg.tracker.omega;
    j["delta_s"] = cfg.tracker.delta_s;
    j["lambda"] = cfg.tracker.lambda;
    j["gate"] = cfg.tracker.gate;
    j["n_init"] = cfg.tracker.n_init;
    j["track_max_age"] = cfg.tracker.max_age;
    j["ema_alpha"] = cfg.tracker.ema_alpha;
    j["anti_occlusion"] = cfg.tracker.anti_occlusion;
    j["anchor"] = cfg.tracker.anchor_bottom_center ? "bottom_center" : "centroid";
    if (cfg.d_max_px > 0.0) {
        j["d_max_px"] = cfg.d_max_px;
    } else {
        j["d_max_px"] = nullptr;
    }
    j["mat_min"] = cfg.mat_min;
    j["t_max_s"] = cfg.t_max_s;
    j["fastdtw_radius"] = cfg.fastdtw_radius;
    j["normalize_dtw"] = cfg.normalize_dtw;
    j["embedding_dim"] = cfg.embedding_dim;
    j["seed"] = cfg.seed;
    open_out(path) << j.dump(2) << '\n';
}

sim::Scenario read_scenario_json(const std::string& path) {
    std::ifstream in = open_in(path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw parse_error(std::string("bad scenario JSON: ") + e.what());
    }
    sim::Scenario s;
    s.name = j.value("name", std::string("scenario"));
    s.duration_s = j.at("duration_s").get<double>();
    if (!(s.duration_s > 0.0)) throw parse_error("scenario: duration_s must be > 0");
    s.seed = j.value("seed", 0ULL);
    s.camera = camera_from_json(j.at("camera"));
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        s.noise.ais_interval_min_s = n.value("ais_interval_min_s", 2.0);
        s.noise.ais_interval_max_s = n.value("ais_interval_max_s", 10.0);
        s.noise.ais_latency_s = n.value("ais_latency_s", 0.0);
        s.noise.ais_dropout = n.value("ais_dropout", 0.0);
        s.noise.gps_sigma_m = n.value("gps_sigma_m", 0.0);
        s.noise.box_jitter_sigma_px = n.value("box_jitter_sigma_px", 0.0);
        s.noise.miss_rate = n.value("miss_rate", 0.0);
        s.noise.embedding_dim = n.value("embedding_dim", 128);
        s.noise.embedding_noise_sigma = n.value("embedding_noise_sigma", 0.0);
        s.noise.occlusion_embedding_corruption = n.value("occlusion_embedding_corruption", 0.0);
        s.noise.occlusion_visibility_threshold = n.value("occlusion_visibility_threshold", 0.25);
    }
    for (const auto& vj : j.at("vessels")) {
        sim::VesselSpec v;
        v.mmsi = vj.at("mmsi").get<std::int64_t>();
        v.start = {vj.at("start").at("lon").get<double>(), vj.at("start").at("lat").get<double>()};
        for (const auto& leg : vj.at("schedule")) {
            v.schedule.push_back({leg.at("t").get<double>(), leg.at("sog_kn").get<double>(),
                                  leg.at("cog_deg").get<double>()});
        }
        v.length_m = vj.value("length_m", 30.0);
        v.beam_m = vj.value("beam_m", 10.0);
        v.height_m = vj.value("height_m", 8.0);
        v.has_ais = vj.value("has_ais", true);
        v.silence_from_s = vj.value("silence_from_s", 0.0);
        v.silence_to_s = vj.value("silence_to_s", 0.0);
        s.vessels.push_back(std::move(v));
    }
    return s;
}

void write_scenario_json(const std::string& path, const sim::Scenario& s) {
    ordered_json j;
    j["name"] = s.name;
    j["duration_s"] = s.duration_s;
    j["seed"] = s.seed;
    j["camera"] = camera_to_json(s.camera);
    ordered_json n;
    n["ais_interval_min_s"] = s.noise.ais_interval_min_s;
    n["ais_interval_max_s"] = s.noise.ais_interval_max_s;
    n["ais_latency_s"] = s.noise.ais_latency_s;
    n["ais_dropout"] = s.noise.ais_dropout;
    n["gps_sigma_m"] = s.noise.gps_sigma_m;
    n["box_jitter_sigma_px"] = s.noise.box_jitter_sigma_px;
    n["miss_rate"] = s.noise.miss_rate;
    n["embedding_dim"] = s.noise.embedding_dim;
    n["embedding_noise_sigma"] = s.noise.embedding_noise_sigma;
    n["occlusion_embedding_corruption"] = s.noise.occlusion_embedding_corruption;
    n["occlusion_visibility_threshold"] = s.noise.occlusion_visibility_threshold;
    j["noise"] = std::move(n);
    j["vessels"] = ordered_json::array();
    for (const sim::VesselSpec& v : s.vessels) {
        ordered_json vj;
        vj["mmsi"] = v.mmsi;
        vj["start"] = {{"lon", v.start.lon}, {"lat", v.start.lat}};
        vj["schedule"] = ordered_json::array();
        for (const sim::ScheduleLeg& leg : v.schedule) {
            vj["schedule"].push_back(
                {{"t", leg.t}, {"sog_kn", leg.sog_kn}, {"cog_deg", leg.cog_deg}});
        }
        vj["length_m"] = v.length_m;
        vj["beam_m"] = v.beam_m;
        vj["height_m"] = v.height_m;
        vj["has_ais"] = v.has_ais;
        vj["silence_from_s"] = v.silence_from_s;
        vj["silence_to_s"] = v.silence_to_s;
        j["vessels"].push_back(std::move(vj));
    }
    open_out(path) << j.dump(2) << '\n';
}

void write_report(const std::string& json_path, const std::string& csv_path,
                  const metrics::FusionReport& report, const std::string& label) {
    ordered_json j;
    const auto put = [&j](const char* key, const std::optional<double>& v) {
        if (v) {
            j[key] = *v;
        } else {
            j[key] = nullptr;
        }
    };
    put("mofa", report.mofa);
    put("idp", report.idp);
    put("idr", report.idr);
    put("idf1", report.idf1);
    put("precision", report.precision);
    put("recall", report.recall);
    put("mota", report.mota);
    put("mofp", report.mofp);
    ordered_json c;
    c["tp_id"] = report.counters.tp_id;
    c["fp_id"] = report.counters.fp_id;
    c["fn_id"] = report.counters.fn_id;
    c["gt_mmsi"] = report.counters.gt_mmsi;
    c["tp_box"] = report.counters.tp_box;
    c["fp_box"] = report.counters.fp_box;
    c["fn_box"] = report.counters.fn_box;
    c["gt_boxes"] = report.counters.gt_boxes;
    c["id_switches"] = report.counters.id_switches;
    j["counters"] = std::move(c);
    open_out(json_path) << j.dump(2) << '\n';

    std::ofstream csv = open_out(csv_path);
    csv << "clip,MOFA,IDP,IDR,IDF1\n";
    const auto pct = [](const std::optional<double>& v) {
        return v ? fmt(*v * 100.0, 2) : std::string("");
    };
    csv << label << ',' << pct(report.mofa) << ',' << pct(report.idp) << ',' << pct(report.idr)
        << ',' << pct(report.idf1) << '\n';
}

} // namespace vesselfuse::io
