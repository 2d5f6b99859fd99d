#include "vesselfuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "vesselfuse/dtw.hpp"

namespace vesselfuse::fusion {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

dtw::PixelSeries ais_series(const ais::AisTrajectory& traj) {
    return dtw::PixelSeries{traj.pixels, traj.times};
}

dtw::PixelSeries track_series(const tracking::VisualTrack& track) {
    return dtw::PixelSeries{track.anchors, track.times};
}

tracking::Rect current_rect(const tracking::VisualTrack& track) {
    if (track.time_since_update == 0) return track.last_box.box;
    return tracking::KalmanBoxFilter::to_rect(track.kalman_mean.head<4>());
}

} // namespace

assignment::CostMatrix build_similarity_matrix(const std::vector<ais::AisTrajectory>& t_ais,
                                               const std::vector<tracking::VisualTrack>& t_vis,
                                               const AssociationSet& bindings, double d_max,
                                               int radius, bool normalize, TickStats* stats) {
    std::set<std::int64_t> bound_mmsi;
    std::set<int> bound_track;
    std::set<Pair> bound_pairs;
    for (const Pair& p : bindings) {
        bound_mmsi.insert(p.first);
        bound_track.insert(p.second);
        bound_pairs.insert(p);
    }

    assignment::CostMatrix costs(t_ais.size(), t_vis.size());
    for (std::size_t i = 0; i < t_ais.size(); ++i) {
        for (std::size_t j = 0; j < t_vis.size(); ++j) {
            const geo::PixelPoint a = t_ais[i].pixels.back();
            const geo::PixelPoint v = t_vis[j].anchors.back();
            if (std::hypot(a.x - v.x, a.y - v.y) > d_max) {
                costs.at(i, j) = kInf;
                continue;
            }
            const Pair pair{t_ais[i].mmsi, t_vis[j].id};
            if (bound_mmsi.contains(pair.first) || bound_track.contains(pair.second)) {
                costs.at(i, j) = bound_pairs.contains(pair) ? -kInf : kInf;
                continue;
            }
            const dtw::AlignResult aligned =
                dtw::fastdtw(ais_series(t_ais[i]), track_series(t_vis[j]), radius);
            const double dis = normalize && !aligned.path.pairs.empty()
                                   ? aligned.distance / static_cast<double>(aligned.path.pairs.size())
                                   : aligned.distance;
            costs.at(i, j) =
                dis * std::exp(dtw::direction_angle(ais_series(t_ais[i]), track_series(t_vis[j])));
            if (stats) {
                stats->similarity_evaluations += 1;
                stats->evaluated_cells.push_back(pair);
            }
        }
    }
    return costs;
}

MatchCounts update_counts(const MatchCounts& last, const std::vector<Pair>& matched, double now,
                          double t_max) {
    MatchCounts next;
    std::set<Pair> matched_set(matched.begin(), matched.end());
    for (const Pair& p : matched) {
        const auto it = last.find(p);
        next[p] = MatchCount{it != last.end() ? it->second.count + 1 : 1, now};
    }
    for (const auto& [pair, entry] : last) {
        if (matched_set.contains(pair)) continue;
        if (now - entry.last_match_time < t_max) next[pair] = entry;
    }
    return next;
}

AssociationSet promote_associations(const MatchCounts& counts, int mat_min) {
    std::vector<std::pair<Pair, int>> candidates;
    for (const auto& [pair, entry] : counts) {
        if (entry.count > mat_min) candidates.emplace_back(pair, entry.count);
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    AssociationSet result;
    std::set<std::int64_t> used_mmsi;
    std::set<int> used_track;
    for (const auto& [pair, count] : candidates) {
        if (used_mmsi.contains(pair.first) || used_track.contains(pair.second)) continue;
        used_mmsi.insert(pair.first);
        used_track.insert(pair.second);
        result.push_back(pair);
    }
    std::sort(result.begin(), result.end());
    return result;
}

Engine::Engine(config::EngineConfig config) : config_(std::move(config)) {
    config_.tracker.image_width = config_.camera.image_width;
    config_.tracker.image_height = config_.camera.image_height;
    tracker_ = tracking::Tracker(config_.tracker);
}

std::vector<FusedAnnotation> Engine::tick(double t, const std::vector<ais::AisRecord>& ais_batch,
                                          const std::vector<tracking::DetectionBox>& detections) {
    if (ticked_ && t <= last_t_) {
        throw std::invalid_argument("fusion: out-of-order tick timestamp");
    }
    for (const tracking::DetectionBox& d : detections) {
        if (std::abs(d.t - t) > 1e-6) {
            throw std::invalid_argument("fusion: detection batch timestamp outside tick window");
        }
    }

    stats_ = TickStats{};
    stats_.t = t;
    stats_.bindings_in = associations_;

    // AIS side: clean, store, dead-reckon, project. Vessels whose projection
    // left the frame produce no current pixel and sit out of matching until
    // they are visible again.
    const std::vector<ais::AisRecord> cleaned =
        ais::clean(ais_batch, config_.camera, t, config_.store.clean);
    store_.update(cleaned, t, config_.camera, config_.store);
    std::vector<ais::AisTrajectory> t_ais = store_.pixel_trajectories(config_.camera);
    std::erase_if(t_ais,
                  [&](const ais::AisTrajectory& traj) { return traj.times.back() < t - 0.5; });

    // Visual side, fed last tick's bindings as prior knowledge.
    std::map<int, std::int64_t> binding_of_track;
    for (const Pair& p : associations_) binding_of_track[p.second] = p.first;
    const tracking::Tracker::StepResult step = tracker_.step(t, detections, t_ais, binding_of_track);

    std::vector<tracking::VisualTrack> confirmed;
    for (const tracking::VisualTrack& track : step.tracks) {
        if (track.status == tracking::TrackStatus::confirmed && !track.anchors.empty()) {
            confirmed.push_back(track);
        }
    }

    // Asynchronous matching.
    const assignment::CostMatrix costs =
        build_similarity_matrix(t_ais, confirmed, associations_, config_.effective_d_max(),
                                config_.fastdtw_radius, config_.normalize_dtw, &stats_);
    const assignment::Matching matching = assignment::solve(costs);

    std::vector<Pair> matched;
    matched.reserve(matching.size());
    for (const auto& [i, j] : matching) {
        matched.emplace_back(t_ais[i].mmsi, confirmed[j].id);
    }
    stats_.matched_pairs = matched;

    counts_ = update_counts(counts_, matched, t, config_.t_max_s);

    // Track ids never recur, so counts and bindings of dead tracks are gone
    // for good; an absent AIS member instead times out through the T_max
    // carry rule above.
    std::set<int> live_track;
    for (const tracking::VisualTrack& track : step.tracks) live_track.insert(track.id);
    std::erase_if(counts_, [&](const auto& entry) {
        return !live_track.contains(entry.first.second);
    });

    associations_ = promote_associations(counts_, config_.mat_min);

    std::map<int, std::int64_t> bound;
    for (const Pair& p : associations_) bound[p.second] = p.first;
    std::map<int, std::int64_t> matched_mmsi;
    for (const Pair& p : matched) matched_mmsi[p.second] = p.first;

    // Coasting tracks stay alive for matching but report no box; only tracks
    // refreshed this tick (a detection or an anti-occlusion prediction) are
    // emitted.
    std::vector<FusedAnnotation> annotations;
    annotations.reserve(confirmed.size());
    for (const tracking::VisualTrack& track : confirmed) {
        if (track.time_since_update != 0) continue;
        FusedAnnotation ann;
        ann.t = t;
        ann.track_id = track.id;
        ann.box = current_rect(track);
        ann.box_predicted = track.box_predicted;
        if (const auto it = bound.find(track.id); it != bound.end()) {
            ann.provenance = Provenance::associated;
            ann.mmsi = it->second;
        } else if (const auto mit = matched_mmsi.find(track.id); mit != matched_mmsi.end()) {
            ann.provenance = Provenance::matched;
            ann.mmsi = mit->second;
        } else {
            ann.provenance = Provenance::unmatched;
        }
        if (ann.mmsi) {
            if (const auto rec = store_.latest(*ann.mmsi)) {
                ann.ais = AisSnapshot{rec->pos.lon, rec->pos.lat, rec->sog_kn, rec->cog_deg,
                                      rec->heading_deg};
            }
        }
        annotations.push_back(std::move(ann));
    }

    last_t_ = t;
    ticked_ = true;
    return annotations;
}

} // namespace vesselfuse::fusion
