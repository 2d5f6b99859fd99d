#pragma once

#include <cstdint>

#include "vesselfuse/ais.hpp"
#include "vesselfuse/geo.hpp"
#include "vesselfuse/tracking.hpp"

namespace vesselfuse::config {

// Full engine operating point. Defaults reproduce the reference settings:
// omega = 0, delta = 5 s, D_max = image_width / 2, Mat_min = 15, T_max = 15 s,
// FastDTW radius 1, 120 s retention, 2 nmi supervision region.
struct EngineConfig {
    geo::CameraModel camera;
    ais::StoreRules store;
    tracking::TrackerConfig tracker;
    double d_max_px = -1.0; // <= 0 resolves to image_width / 2
    int mat_min = 15;
    double t_max_s = 15.0;
    int fastdtw_radius = 1;
    bool normalize_dtw = false; // divide path cost by path length before e^phi
    int embedding_dim = 128;
    std::uint64_t seed = 0;

    double effective_d_max() const {
        return d_max_px > 0.0 ? d_max_px : camera.image_width / 2.0;
    }
};

} // namespace vesselfuse::config
