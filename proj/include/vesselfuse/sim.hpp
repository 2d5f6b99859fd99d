#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vesselfuse/ais.hpp"
#include "vesselfuse/geo.hpp"
#include "vesselfuse/tracking.hpp"

namespace vesselfuse::sim {

// Piecewise-constant kinematics: the leg with the largest t <= now applies.
struct ScheduleLeg {
    double t = 0.0;
    double sog_kn = 0.0;
    double cog_deg = 0.0;
};

struct VesselSpec {
    std::int64_t mmsi = 0;
    geo::GeoPoint start;
    std::vector<ScheduleLeg> schedule;
    double length_m = 30.0;
    double beam_m = 10.0;
    double height_m = 8.0; // above waterline; gives boxes vertical extent
    bool has_ais = true;
    // Deterministic AIS blackout window (exclusive of reports), 0/0 = none.
    double silence_from_s = 0.0;
    double silence_to_s = 0.0;
};

struct NoiseModel {
    double ais_interval_min_s = 2.0;
    double ais_interval_max_s = 10.0;
    double ais_latency_s = 0.0;
    double ais_dropout = 0.0;
    double gps_sigma_m = 0.0;
    double box_jitter_sigma_px = 0.0;
    double miss_rate = 0.0;
    int embedding_dim = 128;
    double embedding_noise_sigma = 0.0;
    double occlusion_embedding_corruption = 0.0;
    // Overlap ratio beyond which the farther vessel is deterministically missed.
    double occlusion_visibility_threshold = 0.25;
};

struct Scenario {
    std::string name;
    std::vector<VesselSpec> vessels;
    geo::CameraModel camera;
    double duration_s = 60.0;
    NoiseModel noise;
    std::uint64_t seed = 0;
};

// One vessel at one second of simulated truth.
struct GroundTruthEntry {
    double t = 0.0;
    std::int64_t mmsi = 0; // 0 for vessels without AIS truth
    int track_id = 0;
    tracking::Rect box;
    bool in_view = false;
    bool occluded = false;         // hidden behind a nearer vessel this second
    double occlusion_ratio = 0.0;  // strongest overlap with a nearer vessel
    double depth_m = 0.0;          // distance along the optical axis
    geo::GeoPoint pos;
    double sog_kn = 0.0;
    double cog_deg = 0.0;
};

struct DetectionFrame {
    double t = 0.0;
    std::vector<tracking::DetectionBox> boxes;
};

// Per-second truth via the same geodesic integrator the engine predicts with.
std::vector<GroundTruthEntry> ground_truth(const Scenario& scenario);

// Asynchronous AIS stream: per-vessel report times with uniform inter-arrival,
// latency-stale positions, dropouts and GPS noise. Sorted by timestamp.
std::vector<ais::AisRecord> emit_ais(const Scenario& scenario);

// Per-second detection stream: jittered truth boxes, random misses, occluded
// vessels deterministically missed, synthetic appearance embeddings.
std::vector<DetectionFrame> emit_detections(const Scenario& scenario);

// Canonical scenario library.
std::vector<std::string> preset_names();
Scenario preset(const std::string& name, std::uint64_t seed = 1);

} // namespace vesselfuse::sim
