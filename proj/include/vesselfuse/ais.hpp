#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "vesselfuse/geo.hpp"

namespace vesselfuse::ais {

// One decoded AIS position report. `synthetic` marks dead-reckoned fills.
struct AisRecord {
    std::int64_t mmsi = 0;
    double t = 0.0; // unix seconds
    geo::GeoPoint pos;
    double sog_kn = 0.0;
    double cog_deg = 0.0;
    std::optional<double> heading_deg; // empty = unavailable
    bool synthetic = false;
};

// Time-ordered, pixel-projected trajectory for one vessel. Parallel arrays.
struct AisTrajectory {
    std::int64_t mmsi = 0;
    std::vector<double> times;
    std::vector<geo::PixelPoint> pixels;
    std::vector<geo::GeoPoint> geos;
    std::vector<bool> synthetic;
};

struct CleanRules {
    double region_radius_m = 3704.0; // two nautical miles
    double max_sog_kn = 50.0;
};

struct StoreRules {
    CleanRules clean;
    double retention_s = 120.0; // max point age and silence-eviction horizon
};

bool record_fields_valid(const AisRecord& r, const CleanRules& rules);

// Drops invalid fields, reports outside the supervision region, future-stamped
// records, and (mmsi, t) duplicates (first wins). Pure filter, never throws.
std::vector<AisRecord> clean(const std::vector<AisRecord>& records, const geo::CameraModel& cam,
                             double now, const CleanRules& rules = {});

// Extrapolates the last report along its course by sog * dt.
AisRecord dead_reckon(const AisRecord& last, double t_target);

// Per-vessel report history plus a synthetic fill per silent tick.
class AisStore {
public:
    struct Vessel {
        std::vector<AisRecord> records; // strictly increasing t
        double last_received = 0.0;     // newest real (non-synthetic) t
    };

    // `fresh` must already be cleaned. Appends, dead-reckons silent vessels at
    // every integer tick up to `now`, re-cleans predictions, prunes old points
    // and evicts vessels silent longer than retention.
    void update(const std::vector<AisRecord>& fresh, double now, const geo::CameraModel& cam,
                const StoreRules& rules = {});

    // Pixel-projected trajectories; behind-camera / off-domain points skipped,
    // vessels with no projectable point omitted.
    std::vector<AisTrajectory> pixel_trajectories(const geo::CameraModel& cam) const;

    const std::map<std::int64_t, Vessel>& vessels() const { return vessels_; }

    // Newest stored record (real or synthetic) for annotation snapshots.
    std::optional<AisRecord> latest(std::int64_t mmsi) const;

private:
    std::map<std::int64_t, Vessel> vessels_;
};

inline constexpr double kKnotsToMps = 1852.0 / 3600.0;

} // namespace vesselfuse::ais
