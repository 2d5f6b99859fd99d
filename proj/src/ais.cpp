#include "vesselfuse/ais.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace vesselfuse::ais {

bool record_fields_valid(const AisRecord& r, const CleanRules& rules) {
    if (r.mmsi < 100000000 || r.mmsi > 999999999) return false;
    if (!std::isfinite(r.t)) return false;
    if (!geo::is_valid(r.pos)) return false;
    if (!std::isfinite(r.sog_kn) || r.sog_kn < 0.0 || r.sog_kn >= rules.max_sog_kn) return false;
    if (!std::isfinite(r.cog_deg) || r.cog_deg < 0.0 || r.cog_deg >= 360.0) return false;
    if (!r.heading_deg.has_value()) return false;
    if (!std::isfinite(*r.heading_deg) || *r.heading_deg < 0.0 || *r.heading_deg >= 360.0) {
        return false;
    }
    return true;
}

std::vector<AisRecord> clean(const std::vector<AisRecord>& records, const geo::CameraModel& cam,
                             double now, const CleanRules& rules) {
    std::vector<AisRecord> kept;
    kept.reserve(records.size());
    std::set<std::pair<std::int64_t, double>> seen;
    for (const AisRecord& r : records) {
        if (!record_fields_valid(r, rules)) continue;
        if (r.t > now) continue;
        if (geo::geodesic_distance(r.pos, cam.camera_geo) > rules.region_radius_m) continue;
        if (!seen.insert({r.mmsi, r.t}).second) continue;
        kept.push_back(r);
    }
    return kept;
}

AisRecord dead_reckon(const AisRecord& last, double t_target) {
    const double dt = t_target - last.t;
    if (!(dt > 0.0)) {
        throw std::invalid_argument("dead_reckon: target time must be after the last report");
    }
    AisRecord out = last;
    out.t = t_target;
    out.pos = geo::forward_geodetic(last.pos, last.cog_deg, last.sog_kn * kKnotsToMps * dt);
    out.synthetic = true;
    return out;
}

void AisStore::update(const std::vector<AisRecord>& fresh, double now,
                      const geo::CameraModel& cam, const StoreRules& rules) {
    std::vector<AisRecord> batch = fresh;
    std::stable_sort(batch.begin(), batch.end(),
                     [](const AisRecord& a, const AisRecord& b) { return a.t < b.t; });

    for (const AisRecord& r : batch) {
        Vessel& vessel = vessels_[r.mmsi];
        if (!vessel.records.empty() && vessel.records.back().t >= r.t) continue;
        vessel.records.push_back(r);
        vessel.last_received = std::max(vessel.last_received, r.t);
    }

    // One synthetic point per missing integer tick, chained from the newest
    // stored point; a prediction that fails re-cleaning stops the fill.
    for (auto& [mmsi, vessel] : vessels_) {
        if (vessel.records.empty()) continue;
        double next_tick = std::floor(vessel.records.back().t) + 1.0;
        while (next_tick <= now) {
            AisRecord predicted = dead_reckon(vessel.records.back(), next_tick);
            if (!record_fields_valid(predicted, rules.clean) ||
                geo::geodesic_distance(predicted.pos, cam.camera_geo) > rules.clean.region_radius_m) {
                break;
            }
            vessel.records.push_back(std::move(predicted));
            next_tick += 1.0;
        }
    }

    for (auto it = vessels_.begin(); it != vessels_.end();) {
        Vessel& vessel = it->second;
        if (now - vessel.last_received > rules.retention_s) {
            it = vessels_.erase(it);
            continue;
        }
        std::erase_if(vessel.records,
                      [&](const AisRecord& r) { return r.t < now - rules.retention_s; });
        if (vessel.records.empty()) {
            it = vessels_.erase(it);
            continue;
        }
        ++it;
    }
}

std::vector<AisTrajectory> AisStore::pixel_trajectories(const geo::CameraModel& cam) const {
    std::vector<AisTrajectory> out;
    for (const auto& [mmsi, vessel] : vessels_) {
        AisTrajectory traj;
        traj.mmsi = mmsi;
        for (const AisRecord& r : vessel.records) {
            try {
                const geo::PixelPoint px = geo::geo_to_pixel(r.pos, cam);
                if (px.x < 0.0 || px.x >= cam.image_width || px.y < 0.0 ||
                    px.y >= cam.image_height) {
                    continue; // projects outside the frame; useless for matching
                }
                traj.times.push_back(r.t);
                traj.pixels.push_back(px);
                traj.geos.push_back(r.pos);
                traj.synthetic.push_back(r.synthetic);
            } catch (const domain_error&) {
                // behind camera or outside projection domain at this tick
            }
        }
        if (!traj.times.empty()) out.push_back(std::move(traj));
    }
    return out;
}

std::optional<AisRecord> AisStore::latest(std::int64_t mmsi) const {
    const auto it = vessels_.find(mmsi);
    if (it == vessels_.end() || it->second.records.empty()) return std::nullopt;
    return it->second.records.back();
}

} // namespace vesselfuse::ais
