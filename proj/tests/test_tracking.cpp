#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vesselfuse/tracking.hpp"

using namespace vesselfuse;
using tracking::DetectionBox;
using tracking::Rect;

namespace {

DetectionBox det(double t, double x_tl, double y_tl, double x_br, double y_br) {
    DetectionBox d;
    d.t = t;
    d.box = Rect{x_tl, y_tl, x_br, y_br};
    return d;
}

std::vector<double> unit_vec(std::size_t dim, std::size_t hot) {
    std::vector<double> v(dim, 0.0);
    v[hot] = 1.0;
    return v;
}

} // namespace

TEST_CASE("occlusion_ratio: overlap over smallest member") {
    CHECK(tracking::occlusion_ratio({{0, 0, 10, 10}, {20, 20, 30, 30}}) == 0.0);
    // areas 100 and 200, overlap 30
    CHECK(tracking::occlusion_ratio({{0, 0, 10, 10}, {4, 0, 24, 10}}) ==
          doctest::Approx(60.0 / 100.0));
    CHECK(tracking::occlusion_ratio({{0, 0, 10, 10}, {7, 5, 13, 15}}) ==
          doctest::Approx(15.0 / 60.0));
    // nested box: overlap equals the smaller area
    CHECK(tracking::occlusion_ratio({{0, 0, 20, 20}, {5, 5, 10, 10}}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(tracking::occlusion_ratio({{0, 0, 1, 1}}), std::invalid_argument);
}

TEST_CASE("detect_occlusion_areas: threshold semantics") {
    // 1 px^2 of contact with omega = 0 already triggers
    const std::vector<Rect> touching{{0, 0, 10, 10}, {9, 9, 19, 19}};
    const auto areas = tracking::detect_occlusion_areas(touching, 0.0);
    REQUIRE(areas.size() == 1);
    CHECK(areas[0].rect.x_tl == 0.0);
    CHECK(areas[0].rect.y_br == 19.0);

    // 30% overlap stays below omega = 0.5
    const std::vector<Rect> mild{{0, 0, 10, 10}, {7, 0, 17, 10}};
    CHECK(tracking::detect_occlusion_areas(mild, 0.5).empty());
    CHECK(tracking::detect_occlusion_areas(mild, 0.0).size() == 1);
}

TEST_CASE("detect_occlusion_areas: chained group and containment") {
    const std::vector<Rect> chain{{0, 0, 10, 10}, {8, 0, 18, 10}, {16, 0, 26, 10}};
    const std::vector<int> ids{5, 6, 7};
    const auto areas = tracking::detect_occlusion_areas(chain, 0.0, &ids);
    REQUIRE(areas.size() == 1);
    CHECK(areas[0].member_track_ids == std::set<int>{5, 6, 7});
    for (const Rect& r : chain) {
        CHECK(areas[0].rect.x_tl <= r.x_tl);
        CHECK(areas[0].rect.y_tl <= r.y_tl);
        CHECK(areas[0].rect.x_br >= r.x_br);
        CHECK(areas[0].rect.y_br >= r.y_br);
    }
}

TEST_CASE("remove_boxes_in_areas: center rule") {
    const std::vector<tracking::OcclusionArea> empty_oar;
    const std::vector<DetectionBox> boxes{det(0, 0, 0, 10, 10), det(0, 20, 20, 30, 30)};
    CHECK(tracking::remove_boxes_in_areas(boxes, empty_oar).size() == 2);

    tracking::OcclusionArea area;
    area.rect = Rect{0, 0, 12, 12};
    const std::vector<tracking::OcclusionArea> oar{area};
    // first box centered at (5,5) inside; second straddles the edge with
    // center (11,11) inside; third center (16,16) outside
    const std::vector<DetectionBox> mixed{det(0, 0, 0, 10, 10), det(0, 6, 6, 16, 16),
                                          det(0, 10, 10, 22, 22)};
    const auto kept = tracking::remove_boxes_in_areas(mixed, oar);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].box.x_tl == 10.0);
}

TEST_CASE("predict_box_ais: corner shift by trajectory displacement") {
    ais::AisTrajectory traj;
    traj.mmsi = 200000001;
    traj.times = {8.0, 9.0, 10.0};
    traj.pixels = {{100, 50}, {105, 52}, {108, 50}};
    const DetectionBox last = det(9.0, 10, 20, 30, 40);

    const auto shifted = tracking::predict_box_ais(last, traj, 10.0);
    REQUIRE(shifted.has_value());
    CHECK(shifted->box.x_tl == doctest::Approx(13.0));
    CHECK(shifted->box.y_tl == doctest::Approx(18.0));
    CHECK(shifted->box.x_br == doctest::Approx(33.0));
    CHECK(shifted->box.y_br == doctest::Approx(38.0));
    CHECK(shifted->predicted);
    CHECK(shifted->box.width() == doctest::Approx(last.box.width()));
    CHECK(shifted->box.height() == doctest::Approx(last.box.height()));

    // stationary AIS leaves the box in place
    ais::AisTrajectory still = traj;
    still.pixels = {{70, 70}, {70, 70}, {70, 70}};
    const auto same = tracking::predict_box_ais(last, still, 10.0);
    REQUIRE(same.has_value());
    CHECK(same->box.x_tl == 10.0);

    // missing a sample at either tick reports no prediction
    CHECK_FALSE(tracking::predict_box_ais(last, traj, 12.0).has_value());
}

TEST_CASE("predict_box_visual: velocity from anchor history") {
    const DetectionBox last = det(9.0, 90, 40, 110, 60);
    std::vector<double> times{5.0, 6.0, 7.0, 8.0, 9.0};
    std::vector<geo::PixelPoint> anchors{{80, 42}, {85, 44}, {90, 46}, {95, 48}, {100, 50}};

    // anchors move (5, 2) per tick; the prediction continues the line
    const auto moved = tracking::predict_box_visual(last, times, anchors, 5, 10.0);
    CHECK(moved.box.x_tl == doctest::Approx(95.0));
    CHECK(moved.box.y_tl == doctest::Approx(42.0));
    CHECK(moved.box.width() == doctest::Approx(last.box.width()));
    CHECK(moved.predicted);

    // stationary history shifts nothing
    std::vector<geo::PixelPoint> still(5, geo::PixelPoint{60, 60});
    const auto same = tracking::predict_box_visual(last, times, still, 5, 10.0);
    CHECK(same.box.x_tl == 90.0);

    // short history falls back to the oldest anchor over the actual span
    std::vector<double> short_times{8.0, 9.0};
    std::vector<geo::PixelPoint> short_anchors{{96, 48}, {100, 50}};
    const auto young = tracking::predict_box_visual(last, short_times, short_anchors, 5, 10.0);
    CHECK(young.box.x_tl == doctest::Approx(94.0));

    // single anchor: no velocity information
    const auto lone = tracking::predict_box_visual(last, {9.0}, {{100, 50}}, 5, 10.0);
    CHECK(lone.box.x_tl == 90.0);
}

TEST_CASE("feature bank: keep, store, drop") {
    tracking::VisualTrack occluded;
    occluded.id = 3;
    occluded.last_box = det(4.0, 0, 0, 10, 10);
    occluded.smoothed_embedding = unit_vec(4, 1);

    tracking::VisualTrack clear_track;
    clear_track.id = 4;
    clear_track.last_box = det(4.0, 50, 50, 60, 60);
    clear_track.smoothed_embedding = unit_vec(4, 2);

    tracking::OcclusionArea area;
    area.rect = Rect{0, 0, 20, 20};

    tracking::FeatureBank bank;
    bank = tracking::update_feature_bank(bank, {occluded, clear_track}, {area});
    REQUIRE(bank.count(3) == 1);
    CHECK(bank.at(3) == unit_vec(4, 1));
    CHECK(bank.count(4) == 0);

    // still occluded with a changed live embedding: the banked one stays
    occluded.smoothed_embedding = unit_vec(4, 0);
    bank = tracking::update_feature_bank(bank, {occluded, clear_track}, {area});
    CHECK(bank.at(3) == unit_vec(4, 1));

    // occlusion over: entry dropped
    bank = tracking::update_feature_bank(bank, {occluded, clear_track}, {});
    CHECK(bank.empty());
}

TEST_CASE("tracker: clean single-vessel stream keeps one id and full history") {
    tracking::Tracker tracker;
    int last_id = -1;
    for (int t = 0; t < 30; ++t) {
        const auto step =
            tracker.step(t, {det(t, 100.0 + 5.0 * t, 200.0, 160.0 + 5.0 * t, 240.0)}, {}, {});
        REQUIRE(step.tracks.size() == 1);
        if (t >= 1) {
            CHECK(step.tracks[0].status == tracking::TrackStatus::confirmed);
            CHECK(step.tracks[0].id == last_id);
        }
        last_id = step.tracks[0].id;
        CHECK(step.tracks[0].times.size() == static_cast<std::size_t>(t + 1));
    }
}

TEST_CASE("tracker: no detections ages everything out") {
    tracking::Tracker tracker;
    for (int t = 0; t < 3; ++t) {
        tracker.step(t, {det(t, 100, 200, 160, 240)}, {}, {});
    }
    std::size_t remaining = 1;
    for (int t = 3; t < 12; ++t) {
        remaining = tracker.step(t, {}, {}, {}).tracks.size();
    }
    CHECK(remaining == 0);
}

TEST_CASE("tracker: tick timestamps must advance") {
    tracking::Tracker tracker;
    tracker.step(5.0, {}, {}, {});
    CHECK_THROWS_AS(tracker.step(5.0, {}, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(tracker.step(7.0, {det(6.0, 0, 0, 1, 1)}, {}, {}), std::invalid_argument);
}

TEST_CASE("tracker: ids are never reused") {
    tracking::Tracker tracker;
    std::set<int> seen;
    double t = 0.0;
    for (int round = 0; round < 4; ++round) {
        for (int k = 0; k < 3; ++k, t += 1.0) {
            const auto step =
                tracker.step(t, {det(t, 100.0 + 300.0 * round, 100, 150.0 + 300.0 * round, 140)},
                             {}, {});
            for (const auto& track : step.tracks) {
                seen.insert(track.id);
            }
        }
        for (int k = 0; k < 8; ++k, t += 1.0) {
            tracker.step(t, {}, {}, {}); // starve so the track dies
        }
    }
    CHECK(seen.size() == 4); // distinct id per rebirth
}

TEST_CASE("tracker: occluded track survives on a banked feature and constant embedding") {
    tracking::TrackerConfig cfg;
    cfg.image_width = 2000;
    cfg.image_height = 2000;
    tracking::Tracker tracker(cfg);

    const auto emb_a = unit_vec(8, 0);
    const auto emb_b = unit_vec(8, 5);
    // two vessels approaching, then the far one disappears while overlapping
    int id_b = -1;
    for (int t = 0; t < 40; ++t) {
        std::vector<DetectionBox> dets;
        const double xa = 100.0 + 10.0 * t;  // nearer, west->east
        const double xb = 500.0 - 10.0 * t;  // farther, east->west
        DetectionBox a = det(t, xa, 300, xa + 80, 360);
        a.embedding = emb_a;
        DetectionBox b = det(t, xb, 290, xb + 70, 340);
        b.embedding = emb_b;
        const bool overlapping = xa + 80.0 >= xb && xb + 70.0 >= xa;
        dets.push_back(a);
        if (!overlapping) dets.push_back(b); // detector loses the occluded vessel
        const auto step = tracker.step(t, dets, {}, {});
        for (const auto& track : step.tracks) {
            if (track.status != tracking::TrackStatus::confirmed) continue;
            if (t == 5 && track.smoothed_embedding == emb_b) id_b = track.id;
            if (id_b >= 0 && track.id == id_b && track.box_predicted) {
                // during occlusion the stored appearance must stay bitwise equal
                CHECK(track.smoothed_embedding == emb_b);
            }
        }
        if (t >= 6) {
            // the occluded track never dies during the crossing
            bool b_alive = false;
            for (const auto& track : step.tracks) b_alive |= track.id == id_b;
            CHECK(b_alive);
        }
    }
}
