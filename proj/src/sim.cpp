#include "vesselfuse/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "vesselfuse/rng.hpp"

namespace vesselfuse::sim {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t h = seed ^ 0x9E3779B97F4A7C15ULL;
    h ^= a + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    h ^= b + 0xBF58476D1CE4E5B9ULL + (h << 6) + (h >> 2);
    return h;
}

const ScheduleLeg& leg_at(const VesselSpec& vessel, double t) {
    if (vessel.schedule.empty()) {
        throw std::invalid_argument("scenario: vessel schedule must not be empty");
    }
    const ScheduleLeg* active = &vessel.schedule.front();
    for (const ScheduleLeg& leg : vessel.schedule) {
        if (leg.t <= t) active = &leg;
    }
    return *active;
}

// Positions per integer second, shared by truth, AIS and detection emitters.
std::vector<geo::GeoPoint> integrate_path(const VesselSpec& vessel, double duration) {
    std::vector<geo::GeoPoint> path;
    geo::GeoPoint pos = vessel.start;
    for (double t = 0.0; t <= duration; t += 1.0) {
        path.push_back(pos);
        const ScheduleLeg& leg = leg_at(vessel, t);
        pos = geo::forward_geodetic(pos, leg.cog_deg, leg.sog_kn * ais::kKnotsToMps);
    }
    return path;
}

// Axis-aligned pixel envelope of the hull posts (waterline corners and the
// same corners at deck height).
bool project_hull_box(const VesselSpec& vessel, const geo::GeoPoint& pos, double cog,
                      const geo::CameraModel& cam, tracking::Rect* box, double* depth) {
    const double half_len = vessel.length_m / 2.0;
    const double half_beam = vessel.beam_m / 2.0;
    tracking::Rect r{1e18, 1e18, -1e18, -1e18};
    double depth_sum = 0.0;
    for (const double along : {half_len, -half_len}) {
        for (const double across : {half_beam, -half_beam}) {
            geo::GeoPoint corner =
                geo::forward_geodetic(pos, along >= 0.0 ? cog : cog + 180.0, std::abs(along));
            corner = geo::forward_geodetic(corner, cog + (across >= 0.0 ? 90.0 : 270.0),
                                           std::abs(across));
            geo::EastNorth en;
            try {
                en = geo::mercator(corner, cam.mercator_origin);
            } catch (const domain_error&) {
                return false;
            }
            for (const double height : {0.0, vessel.height_m}) {
                try {
                    const geo::PixelPoint px = geo::project_to_pixel(
                        geo::WorldPoint{en.east, -cam.camera_height_m + height, en.north}, cam);
                    r.x_tl = std::min(r.x_tl, px.x);
                    r.y_tl = std::min(r.y_tl, px.y);
                    r.x_br = std::max(r.x_br, px.x);
                    r.y_br = std::max(r.y_br, px.y);
                } catch (const domain_error&) {
                    return false;
                }
            }
            depth_sum += en.north;
        }
    }
    *box = r;
    *depth = depth_sum / 4.0;
    return true;
}

} // namespace

std::vector<GroundTruthEntry> ground_truth(const Scenario& scenario) {
    std::vector<GroundTruthEntry> out;
    std::vector<std::vector<geo::GeoPoint>> paths;
    paths.reserve(scenario.vessels.size());
    for (const VesselSpec& vessel : scenario.vessels) {
        paths.push_back(integrate_path(vessel, scenario.duration_s));
    }

    for (double t = 0.0; t <= scenario.duration_s; t += 1.0) {
        const auto tick = static_cast<std::size_t>(t);
        std::vector<GroundTruthEntry> frame;
        for (std::size_t v = 0; v < scenario.vessels.size(); ++v) {
            const VesselSpec& vessel = scenario.vessels[v];
            const ScheduleLeg& leg = leg_at(vessel, t);
            GroundTruthEntry entry;
            entry.t = t;
            entry.mmsi = vessel.has_ais ? vessel.mmsi : 0;
            entry.track_id = static_cast<int>(v) + 1;
            entry.pos = paths[v][tick];
            entry.sog_kn = leg.sog_kn;
            entry.cog_deg = leg.cog_deg;
            tracking::Rect box;
            double depth = 0.0;
            if (project_hull_box(vessel, entry.pos, leg.cog_deg, scenario.camera, &box, &depth)) {
                entry.box = box;
                entry.depth_m = depth;
                const geo::PixelPoint c = box.center();
                entry.in_view = c.x >= 0.0 && c.x < scenario.camera.image_width && c.y >= 0.0 &&
                                c.y < scenario.camera.image_height;
            }
            frame.push_back(entry);
        }
        // Overlap against nearer vessels decides deterministic occlusion.
        for (std::size_t a = 0; a < frame.size(); ++a) {
            if (!frame[a].in_view) continue;
            for (std::size_t b = 0; b < frame.size(); ++b) {
                if (a == b || !frame[b].in_view) continue;
                if (frame[b].depth_m >= frame[a].depth_m) continue; // only nearer vessels occlude
                const double inter = tracking::intersection_area(frame[a].box, frame[b].box);
                const double min_area = std::min(frame[a].box.area(), frame[b].box.area());
                if (min_area <= 0.0) continue;
                frame[a].occlusion_ratio = std::max(frame[a].occlusion_ratio, inter / min_area);
            }
            frame[a].occluded =
                frame[a].occlusion_ratio > scenario.noise.occlusion_visibility_threshold;
        }
        out.insert(out.end(), frame.begin(), frame.end());
    }
    return out;
}

std::vector<ais::AisRecord> emit_ais(const Scenario& scenario) {
    std::vector<ais::AisRecord> records;
    for (std::size_t v = 0; v < scenario.vessels.size(); ++v) {
        const VesselSpec& vessel = scenario.vessels[v];
        if (!vessel.has_ais) continue;
        const std::vector<geo::GeoPoint> path = integrate_path(vessel, scenario.duration_s);
        Rng rng(mix_seed(scenario.seed, static_cast<std::uint64_t>(vessel.mmsi), 0xA15));

        double t_meas = static_cast<double>(rng.uniform_int(
            0, static_cast<std::int64_t>(scenario.noise.ais_interval_max_s)));
        while (t_meas <= scenario.duration_s) {
            const double report_t = t_meas;
            t_meas += static_cast<double>(std::max<std::int64_t>(
                1, rng.uniform_int(static_cast<std::int64_t>(scenario.noise.ais_interval_min_s),
                                   static_cast<std::int64_t>(scenario.noise.ais_interval_max_s))));

            const bool silenced = report_t >= vessel.silence_from_s &&
                                  report_t < vessel.silence_to_s;
            const bool dropped = rng.bernoulli(scenario.noise.ais_dropout);
            const double arrival = report_t + scenario.noise.ais_latency_s;
            // draw noise regardless so dropout does not shift later reports
            const double east_err = rng.normal(0.0, scenario.noise.gps_sigma_m);
            const double north_err = rng.normal(0.0, scenario.noise.gps_sigma_m);
            if (silenced || dropped || arrival > scenario.duration_s) continue;

            const ScheduleLeg& leg = leg_at(vessel, report_t);
            geo::GeoPoint pos = path[static_cast<std::size_t>(report_t)];
            if (east_err != 0.0) {
                pos = geo::forward_geodetic(pos, east_err >= 0.0 ? 90.0 : 270.0,
                                            std::abs(east_err));
            }
            if (north_err != 0.0) {
                pos = geo::forward_geodetic(pos, north_err >= 0.0 ? 0.0 : 180.0,
                                            std::abs(north_err));
            }

            ais::AisRecord record;
            record.mmsi = vessel.mmsi;
            record.t = arrival; // timestamped at delivery; the position is stale by the latency
            record.pos = pos;
            record.sog_kn = leg.sog_kn;
            record.cog_deg = leg.cog_deg;
            record.heading_deg = leg.cog_deg;
            records.push_back(record);
        }
    }
    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return a.t != b.t ? a.t < b.t : a.mmsi < b.mmsi;
    });
    return records;
}

std::vector<DetectionFrame> emit_detections(const Scenario& scenario) {
    const std::vector<GroundTruthEntry> truth = ground_truth(scenario);
    std::map<double, std::vector<const GroundTruthEntry*>> by_tick;
    for (const GroundTruthEntry& e : truth) by_tick[e.t].push_back(&e);

    // Per-vessel base appearance vectors.
    std::vector<std::vector<double>> base(scenario.vessels.size());
    for (std::size_t v = 0; v < scenario.vessels.size(); ++v) {
        Rng rng(mix_seed(scenario.seed, v, 0xE0B));
        std::vector<double>& u = base[v];
        u.resize(static_cast<std::size_t>(scenario.noise.embedding_dim));
        double norm = 0.0;
        for (double& x : u) {
            x = rng.normal();
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (double& x : u) x /= norm;
        }
    }

    std::vector<DetectionFrame> frames;
    for (const auto& [t, entries] : by_tick) {
        DetectionFrame frame;
        frame.t = t;
        for (const GroundTruthEntry* e : entries) {
            if (!e->in_view || e->occluded) continue;
            const std::size_t v = static_cast<std::size_t>(e->track_id - 1);
            Rng rng(mix_seed(scenario.seed, v, 0xD000 + static_cast<std::uint64_t>(t)));
            if (rng.bernoulli(scenario.noise.miss_rate)) continue;

            const double sigma = scenario.noise.box_jitter_sigma_px;
            const double dcx = rng.normal(0.0, sigma);
            const double dcy = rng.normal(0.0, sigma);
            const double dw = rng.normal(0.0, sigma / 2.0);
            const double dh = rng.normal(0.0, sigma / 2.0);
            const geo::PixelPoint c = e->box.center();
            const double w = std::max(2.0, e->box.width() + dw);
            const double h = std::max(1.0, e->box.height() + dh);

            tracking::DetectionBox det;
            det.t = t;
            det.box = tracking::Rect{c.x + dcx - w / 2.0, c.y + dcy - h / 2.0,
                                     c.x + dcx + w / 2.0, c.y + dcy + h / 2.0};
            det.confidence = std::clamp(0.95 + rng.normal(0.0, 0.02), 0.5, 1.0);

            if (scenario.noise.embedding_dim > 0) {
                std::vector<double> emb = base[v];
                // Partial overlap pollutes the appearance toward the occluder.
                if (e->occlusion_ratio > 0.0 &&
                    scenario.noise.occlusion_embedding_corruption > 0.0) {
                    const GroundTruthEntry* occluder = nullptr;
                    for (const GroundTruthEntry* other : entries) {
                        if (other == e || !other->in_view) continue;
                        if (other->depth_m < e->depth_m &&
                            tracking::intersection_area(other->box, e->box) > 0.0) {
                            occluder = other;
                            break;
                        }
                    }
                    if (occluder) {
                        const double f = scenario.noise.occlusion_embedding_corruption *
                                         std::min(1.0, e->occlusion_ratio);
                        const auto& uo = base[static_cast<std::size_t>(occluder->track_id - 1)];
                        for (std::size_t k = 0; k < emb.size(); ++k) {
                            emb[k] = (1.0 - f) * emb[k] + f * uo[k];
                        }
                    }
                }
                double norm = 0.0;
                for (double& x : emb) {
                    x += rng.normal(0.0, scenario.noise.embedding_noise_sigma);
                    norm += x * x;
                }
                norm = std::sqrt(norm);
                if (norm > 0.0) {
                    for (double& x : emb) x /= norm;
                }
                det.embedding = std::move(emb);
            }
            frame.boxes.push_back(std::move(det));
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

namespace {

geo::CameraModel default_camera() {
    geo::CameraModel cam;
    cam.k_in << 800.0, 0.0, 640.0,
                0.0, 1400.0, 600.0,
                0.0, 0.0, 1.0;
    cam.image_width = 1280;
    cam.image_height = 720;
    cam.camera_geo = geo::GeoPoint{114.30, 30.60};
    cam.mercator_origin = cam.camera_geo;
    cam.camera_height_m = 25.0;
    return cam;
}

NoiseModel default_noise() {
    NoiseModel n;
    n.ais_interval_min_s = 2.0;
    n.ais_interval_max_s = 10.0;
    n.ais_latency_s = 1.0;
    n.ais_dropout = 0.05;
    n.gps_sigma_m = 2.0;
    n.box_jitter_sigma_px = 0.6;
    n.miss_rate = 0.02;
    n.embedding_dim = 128;
    n.embedding_noise_sigma = 0.05;
    n.occlusion_embedding_corruption = 0.5;
    n.occlusion_visibility_threshold = 0.25;
    return n;
}

// Start positions expressed as east/north meters from the camera.
geo::GeoPoint local(const geo::CameraModel& cam, double east, double north) {
    return geo::mercator_inverse(geo::EastNorth{east, north}, cam.camera_geo);
}

} // namespace

std::vector<std::string> preset_names() {
    return {"single_vessel", "crossing_pair", "overtaking_pair", "five_vessel_mixed",
            "silent_gap"};
}

Scenario preset(const std::string& name, std::uint64_t seed) {
    Scenario s;
    s.name = name;
    s.camera = default_camera();
    s.noise = default_noise();
    s.seed = seed;

    const auto vessel = [&](std::int64_t mmsi, double east, double north, double sog_kn,
                            double cog_deg, double length = 30.0, double beam = 10.0,
                            double height = 8.0) {
        VesselSpec v;
        v.mmsi = mmsi;
        v.start = local(s.camera, east, north);
        v.schedule = {{0.0, sog_kn, cog_deg}};
        v.length_m = length;
        v.beam_m = beam;
        v.height_m = height;
        return v;
    };

    if (name == "single_vessel") {
        s.duration_s = 120.0;
        s.vessels = {vessel(200000001, -200.0, 300.0, 7.0, 90.0)};
    } else if (name == "crossing_pair") {
        s.duration_s = 120.0;
        s.vessels = {vessel(200000001, -200.0, 260.0, 8.0, 90.0),
                     vessel(200000002, 200.0, 320.0, 8.0, 270.0, 34.0, 11.0, 9.0)};
    } else if (name == "overtaking_pair") {
        s.duration_s = 150.0;
        s.vessels = {vessel(200000001, -220.0, 280.0, 9.0, 90.0),
                     vessel(200000002, -100.0, 300.0, 5.0, 90.0, 36.0, 12.0, 9.0)};
    } else if (name == "five_vessel_mixed") {
        s.duration_s = 180.0;
        s.vessels = {vessel(200000001, -240.0, 260.0, 7.0, 90.0),
                     vessel(200000002, 240.0, 320.0, 7.0, 270.0, 34.0, 11.0, 9.0),
                     vessel(200000003, 420.0, 290.0, 10.0, 270.0, 32.0, 10.0, 8.0),
                     vessel(200000004, 430.0, 380.0, 6.0, 270.0, 40.0, 12.0, 10.0),
                     vessel(200000005, -190.0, 240.0, 8.0, 90.0, 26.0, 9.0, 7.0)};
        s.vessels[3].has_ais = false; // background vessel without AIS truth
    } else if (name == "silent_gap") {
        s.duration_s = 260.0;
        s.vessels = {vessel(200000001, -220.0, 300.0, 3.0, 90.0)};
        s.vessels[0].silence_from_s = 10.0;
        s.vessels[0].silence_to_s = 200.0;
    } else {
        throw std::invalid_argument("unknown scenario preset: " + name);
    }
    return s;
}

} // namespace vesselfuse::sim
