#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "vesselfuse/io.hpp"

using namespace vesselfuse;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("vesselfuse_io_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("timestamps: unix seconds and ISO-8601") {
    CHECK(io::parse_timestamp("1700000000") == doctest::Approx(1.7e9));
    CHECK(io::parse_timestamp("12.5") == doctest::Approx(12.5));
    CHECK(io::parse_timestamp("1970-01-01T00:01:00") == doctest::Approx(60.0));
    CHECK(io::parse_timestamp("2023-11-14 22:13:20") == doctest::Approx(1700000000.0));
    CHECK_THROWS_AS(io::parse_timestamp("yesterday-ish:"), parse_error);
}

TEST_CASE("ais csv: round trip, heading sentinel, sorted check") {
    TempDir dir;
    std::vector<ais::AisRecord> records;
    ais::AisRecord r;
    r.mmsi = 200000001;
    r.t = 100.0;
    r.pos = {114.123456789, 30.987654321};
    r.sog_kn = 7.5;
    r.cog_deg = 271.25;
    r.heading_deg = 270.0;
    records.push_back(r);
    r.t = 103.0;
    r.heading_deg.reset();
    records.push_back(r);

    io::write_ais_csv(dir.file("a.csv"), records);
    const auto back = io::read_ais_csv(dir.file("a.csv"));
    REQUIRE(back.size() == 2);
    CHECK(back[0].pos.lon == doctest::Approx(114.123456789).scale(1).epsilon(1e-9));
    CHECK(back[0].heading_deg.has_value());
    CHECK_FALSE(back[1].heading_deg.has_value());

    std::ofstream bad(dir.file("bad.csv"));
    bad << "timestamp,mmsi,lon,lat,speed,course,heading\n";
    bad << "9,200000001,114,30,5,90,90\n";
    bad << "8,200000001,114,30,5,90,90\n";
    bad.close();
    try {
        io::read_ais_csv(dir.file("bad.csv"));
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 3); // names the first offending line
    }
}

TEST_CASE("detections jsonl: round trip with optional embeddings") {
    TempDir dir;
    std::vector<sim::DetectionFrame> frames(2);
    frames[0].t = 5.0;
    tracking::DetectionBox box;
    box.t = 5.0;
    box.box = {10.0, 20.0, 30.0, 40.0};
    box.confidence = 0.9;
    box.embedding = {0.6, 0.8};
    frames[0].boxes.push_back(box);
    box.embedding.clear();
    frames[0].boxes.push_back(box);
    frames[1].t = 6.0;

    io::write_detections_jsonl(dir.file("d.jsonl"), frames);
    const auto back = io::read_detections_jsonl(dir.file("d.jsonl"));
    REQUIRE(back.size() == 2);
    REQUIRE(back[0].boxes.size() == 2);
    CHECK(back[0].boxes[0].embedding.size() == 2);
    CHECK(back[0].boxes[1].embedding.empty());
    CHECK(back[0].boxes[0].box.x_br == 30.0);
    CHECK(back[1].boxes.empty());
}

TEST_CASE("annotations jsonl: provenance and ais snapshot round trip") {
    TempDir dir;
    std::vector<fusion::FusedAnnotation> annotations(2);
    annotations[0].t = 9.0;
    annotations[0].track_id = 3;
    annotations[0].mmsi = 200000007;
    annotations[0].box = {1.0, 2.0, 3.0, 4.0};
    annotations[0].box_predicted = true;
    annotations[0].ais = fusion::AisSnapshot{114.0, 30.0, 8.0, 90.0, 91.0};
    annotations[0].provenance = fusion::Provenance::associated;
    annotations[1].t = 9.0;
    annotations[1].track_id = 4;
    annotations[1].provenance = fusion::Provenance::unmatched;

    io::write_annotations_jsonl(dir.file("ann.jsonl"), annotations);
    const auto preds = io::read_annotations_jsonl(dir.file("ann.jsonl"));
    REQUIRE(preds.size() == 2);
    CHECK(preds[0].mmsi.value() == 200000007);
    CHECK_FALSE(preds[1].mmsi.has_value());

    std::ifstream in(dir.file("ann.jsonl"));
    std::string line;
    std::getline(in, line);
    CHECK(line.find("\"prov\":\"associated\"") != std::string::npos);
    CHECK(line.find("\"pred\":true") != std::string::npos);
    CHECK(line.find("\"heading\":91.0") != std::string::npos);
    std::getline(in, line);
    CHECK(line.find("\"prov\":\"unmatched\"") != std::string::npos);
    CHECK(line.find("mmsi") == std::string::npos);
}

TEST_CASE("gt csv round trip") {
    TempDir dir;
    std::vector<sim::GroundTruthEntry> truth(2);
    truth[0].t = 3.0;
    truth[0].mmsi = 200000001;
    truth[0].track_id = 1;
    truth[0].box = {5.0, 6.0, 7.0, 8.0};
    truth[0].in_view = true;
    truth[1].t = 3.0;
    truth[1].track_id = 2;
    truth[1].in_view = false; // skipped on write

    io::write_gt_csv(dir.file("gt.csv"), truth);
    const auto back = io::read_gt_csv(dir.file("gt.csv"));
    REQUIRE(back.size() == 1);
    CHECK(back[0].mmsi == 200000001);
    CHECK(back[0].box.y_br == 8.0);
}

TEST_CASE("engine config: defaults and round trip") {
    TempDir dir;
    config::EngineConfig cfg;
    cfg.camera.k_in << 800.0, 0.0, 640.0, 0.0, 1400.0, 600.0, 0.0, 0.0, 1.0;
    cfg.camera.image_width = 1280;
    cfg.camera.image_height = 720;
    cfg.camera.camera_geo = {114.3, 30.6};
    cfg.camera.mercator_origin = cfg.camera.camera_geo;
    cfg.camera.camera_height_m = 25.0;

    io::write_config_json(dir.file("cfg.json"), cfg);
    const auto back = io::read_config_json(dir.file("cfg.json"));
    CHECK(back.store.clean.region_radius_m == 3704.0);
    CHECK(back.store.retention_s == 120.0);
    CHECK(back.tracker.omega == 0.0);
    CHECK(back.tracker.delta_s == 5);
    CHECK(back.mat_min == 15);
    CHECK(back.t_max_s == 15.0);
    CHECK(back.fastdtw_radius == 1);
    CHECK(back.effective_d_max() == 640.0);
    CHECK(back.camera.k_in(0, 0) == 800.0);
    CHECK(back.tracker.anti_occlusion);
}

TEST_CASE("scenario json: validation and round trip") {
    TempDir dir;
    const sim::Scenario s = sim::preset("five_vessel_mixed", 3);
    io::write_scenario_json(dir.file("s.json"), s);
    const auto back = io::read_scenario_json(dir.file("s.json"));
    CHECK(back.vessels.size() == 5);
    CHECK(back.duration_s == s.duration_s);
    CHECK(back.vessels[3].has_ais == false);
    CHECK(back.noise.ais_interval_max_s == s.noise.ais_interval_max_s);

    std::ofstream bad(dir.file("bad.json"));
    bad << R"({"duration_s": 0, "camera": {}, "vessels": []})";
    bad.close();
    CHECK_THROWS(io::read_scenario_json(dir.file("bad.json")));
}

TEST_CASE("report: null metrics and percent csv") {
    TempDir dir;
    metrics::FusionReport report;
    report.mofa = 0.9604;
    report.idp = 0.9934;
    report.idr = 0.9668;
    report.idf1 = 0.9798;
    io::write_report(dir.file("r.json"), dir.file("r.csv"), report, "clip-x");

    std::ifstream csv(dir.file("r.csv"));
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    CHECK(header == "clip,MOFA,IDP,IDR,IDF1");
    CHECK(row == "clip-x,96.04,99.34,96.68,97.98");

    std::ifstream json(dir.file("r.json"));
    std::string all((std::istreambuf_iterator<char>(json)), std::istreambuf_iterator<char>());
    CHECK(all.find("\"mota\": null") != std::string::npos);
}
