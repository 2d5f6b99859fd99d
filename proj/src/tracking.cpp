#include "vesselfuse/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vesselfuse/assignment.hpp"

namespace vesselfuse::tracking {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTickEps = 1e-6;

// DeepSORT noise weights, scaled by box height.
constexpr double kWeightPos = 1.0 / 20.0;
constexpr double kWeightVel = 1.0 / 160.0;

std::vector<double> normalized(std::vector<double> v) {
    double norm = 0.0;
    for (const double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
        for (double& x : v) x /= norm;
    }
    return v;
}

double cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) dot += a[i] * b[i];
    return 1.0 - dot;
}

std::optional<geo::PixelPoint> pixel_at(const ais::AisTrajectory& traj, double t) {
    for (std::size_t i = traj.times.size(); i-- > 0;) {
        if (std::abs(traj.times[i] - t) < kTickEps) return traj.pixels[i];
        if (traj.times[i] < t - kTickEps) break;
    }
    return std::nullopt;
}

DetectionBox shifted_box(const DetectionBox& last, double dx, double dy, double t_now) {
    DetectionBox out = last;
    out.t = t_now;
    out.box = Rect{last.box.x_tl + dx, last.box.y_tl + dy, last.box.x_br + dx, last.box.y_br + dy};
    out.embedding.clear();
    out.predicted = true;
    return out;
}

} // namespace

double intersection_area(const Rect& a, const Rect& b) {
    const double w = std::min(a.x_br, b.x_br) - std::max(a.x_tl, b.x_tl);
    const double h = std::min(a.y_br, b.y_br) - std::max(a.y_tl, b.y_tl);
    if (w <= 0.0 || h <= 0.0) return 0.0;
    return w * h;
}

double iou(const Rect& a, const Rect& b) {
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

double occlusion_ratio(const std::vector<Rect>& boxes) {
    if (boxes.size() < 2) {
        throw std::invalid_argument("occlusion_ratio: needs at least two boxes");
    }
    double overlap = 0.0;
    double min_area = kInf;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        min_area = std::min(min_area, boxes[i].area());
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            overlap = std::max(overlap, intersection_area(boxes[i], boxes[j]));
        }
    }
    return min_area > 0.0 ? overlap / min_area : 0.0;
}

std::vector<OcclusionArea> detect_occlusion_areas(const std::vector<Rect>& boxes, double omega,
                                                  const std::vector<int>* ids) {
    const std::size_t n = boxes.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    const auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (intersection_area(boxes[i], boxes[j]) > 0.0) {
                parent[find(i)] = find(j);
            }
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);

    std::vector<OcclusionArea> areas;
    for (const auto& [root, members] : groups) {
        if (members.size() < 2) continue;
        std::vector<Rect> group;
        group.reserve(members.size());
        for (const std::size_t m : members) group.push_back(boxes[m]);
        if (!(occlusion_ratio(group) > omega)) continue;

        OcclusionArea area;
        area.rect = group.front();
        for (const Rect& r : group) {
            area.rect.x_tl = std::min(area.rect.x_tl, r.x_tl);
            area.rect.y_tl = std::min(area.rect.y_tl, r.y_tl);
            area.rect.x_br = std::max(area.rect.x_br, r.x_br);
            area.rect.y_br = std::max(area.rect.y_br, r.y_br);
        }
        if (ids) {
            for (const std::size_t m : members) area.member_track_ids.insert((*ids)[m]);
        }
        areas.push_back(std::move(area));
    }
    return areas;
}

std::vector<DetectionBox> remove_boxes_in_areas(const std::vector<DetectionBox>& boxes,
                                                const std::vector<OcclusionArea>& oar) {
    std::vector<DetectionBox> kept;
    kept.reserve(boxes.size());
    for (const DetectionBox& box : boxes) {
        const geo::PixelPoint c = box.box.center();
        const bool inside = std::any_of(oar.begin(), oar.end(),
                                        [&](const OcclusionArea& a) { return a.rect.contains(c); });
        if (!inside) kept.push_back(box);
    }
    return kept;
}

std::optional<DetectionBox> predict_box_ais(const DetectionBox& last_box,
                                            const ais::AisTrajectory& traj, double t_now) {
    const auto current = pixel_at(traj, t_now);
    const auto previous = pixel_at(traj, t_now - 1.0);
    if (!current || !previous) return std::nullopt;
    return shifted_box(last_box, current->x - previous->x, current->y - previous->y, t_now);
}

DetectionBox predict_box_visual(const DetectionBox& last_box, const std::vector<double>& times,
                                const std::vector<geo::PixelPoint>& anchors, int delta_s,
                                double t_now) {
    if (times.empty()) return shifted_box(last_box, 0.0, 0.0, t_now);

    const geo::PixelPoint prev = anchors.back();
    const double t_prev = times.back();

    // Velocity between the newest anchor and the one delta seconds back (the
    // oldest available for young tracks), over their actual time span. Span
    // division keeps the speed constant when predictions feed the history
    // back, so an occluded track neither stalls nor runs away.
    const double t_old_wanted = t_now - delta_s;
    geo::PixelPoint old = anchors.front();
    double t_old = times.front();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::abs(times[i] - t_old_wanted) < kTickEps) {
            old = anchors[i];
            t_old = times[i];
            break;
        }
    }
    double dx = 0.0;
    double dy = 0.0;
    const double span = t_prev - t_old;
    if (span > 0.0) {
        dx = (prev.x - old.x) / span;
        dy = (prev.y - old.y) / span;
    }
    return shifted_box(last_box, dx, dy, t_now);
}

FeatureBank update_feature_bank(const FeatureBank& bank, const std::vector<VisualTrack>& tracks,
                                const std::vector<OcclusionArea>& oar) {
    FeatureBank next;
    for (const VisualTrack& track : tracks) {
        const geo::PixelPoint c = track.last_box.box.center();
        const bool occluded = std::any_of(oar.begin(), oar.end(),
                                          [&](const OcclusionArea& a) { return a.rect.contains(c); });
        if (!occluded) continue;
        const auto it = bank.find(track.id);
        if (it != bank.end()) {
            next[track.id] = it->second;
        } else if (!track.smoothed_embedding.empty()) {
            next[track.id] = track.smoothed_embedding;
        }
    }
    return next;
}

KalmanBoxFilter::Vec4 KalmanBoxFilter::to_measurement(const Rect& box) {
    const double w = box.width();
    const double h = box.height();
    return Vec4{box.x_tl + w / 2.0, box.y_tl + h / 2.0, h > 0.0 ? w / h : 0.0, h};
}

Rect KalmanBoxFilter::to_rect(const Vec4& m) {
    const double h = m(3);
    const double w = m(2) * h;
    return Rect{m(0) - w / 2.0, m(1) - h / 2.0, m(0) + w / 2.0, m(1) + h / 2.0};
}

void KalmanBoxFilter::initiate(const Vec4& m) {
    mean_.setZero();
    mean_.head<4>() = m;
    const double h = m(3);
    Vec8 std;
    std << 2 * kWeightPos * h, 2 * kWeightPos * h, 1e-2, 2 * kWeightPos * h,
        10 * kWeightVel * h, 10 * kWeightVel * h, 1e-5, 10 * kWeightVel * h;
    cov_ = std.array().square().matrix().asDiagonal();
}

void KalmanBoxFilter::predict() {
    Mat8 f = Mat8::Identity();
    for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
    const double h = mean_(3);
    Vec8 std;
    std << kWeightPos * h, kWeightPos * h, 1e-2, kWeightPos * h,
        kWeightVel * h, kWeightVel * h, 1e-5, kWeightVel * h;
    const Mat8 q = std.array().square().matrix().asDiagonal();
    mean_ = f * mean_;
    cov_ = f * cov_ * f.transpose() + q;
}

namespace {
Eigen::Matrix4d projected_innovation_cov(const Eigen::Matrix<double, 8, 8>& cov, double h) {
    Eigen::Vector4d std{kWeightPos * h, kWeightPos * h, 1e-1, kWeightPos * h};
    return cov.topLeftCorner<4, 4>() +
           Eigen::Matrix4d(std.array().square().matrix().asDiagonal());
}
} // namespace

void KalmanBoxFilter::update(const Vec4& m) {
    const Eigen::Matrix4d s = projected_innovation_cov(cov_, mean_(3));
    const Eigen::Matrix<double, 8, 4> pht = cov_.leftCols<4>();
    const Eigen::Matrix<double, 8, 4> gain = s.llt().solve(pht.transpose()).transpose();
    const Vec4 innovation = m - mean_.head<4>();
    mean_ += gain * innovation;
    Mat8 kh = Mat8::Zero();
    kh.leftCols<4>() = gain;
    cov_ = (Mat8::Identity() - kh) * cov_;
}

double KalmanBoxFilter::gating_distance(const Vec4& m) const {
    const Eigen::Matrix4d s = projected_innovation_cov(cov_, mean_(3));
    const Vec4 d = m - mean_.head<4>();
    return d.dot(s.llt().solve(d));
}

geo::PixelPoint Tracker::anchor_of(const Rect& box) const {
    if (config_.anchor_bottom_center) {
        return {(box.x_tl + box.x_br) / 2.0, box.y_br};
    }
    return box.center();
}

VisualTrack Tracker::view_of(const Track& track) const {
    VisualTrack v;
    v.id = track.id;
    v.times = track.times;
    v.anchors = track.anchors;
    v.last_box = track.last_box;
    v.status = track.status;
    v.hits = track.hits;
    v.time_since_update = track.time_since_update;
    v.smoothed_embedding = track.embedding;
    v.box_predicted = track.box_predicted;
    v.kalman_mean = track.kf.mean();
    v.kalman_cov = track.kf.covariance();
    return v;
}

Tracker::StepResult Tracker::step(double t, const std::vector<DetectionBox>& detections,
                                  const std::vector<ais::AisTrajectory>& t_ais,
                                  const std::map<int, std::int64_t>& bindings) {
    if (last_t_ >= 0.0 && t <= last_t_) {
        throw std::invalid_argument("tracker: tick timestamps must increase");
    }
    for (const DetectionBox& d : detections) {
        if (std::abs(d.t - t) > kTickEps) {
            throw std::invalid_argument("tracker: detection timestamp outside current tick");
        }
    }
    last_t_ = t;

    // Step 1: drop detections inside the previous occlusion areas. A box that
    // one confirmed track clearly owns survives; removal is for the merged or
    // corrupted boxes an overlap produces. Unconditional removal lets grazing
    // contacts starve visible vessels of evidence and the areas never resolve.
    std::vector<DetectionBox> inputs;
    if (config_.anti_occlusion) {
        inputs = remove_boxes_in_areas(detections, oar_);
        for (const DetectionBox& det : detections) {
            const geo::PixelPoint c = det.box.center();
            const bool removed =
                std::any_of(oar_.begin(), oar_.end(),
                            [&](const OcclusionArea& a) { return a.rect.contains(c); });
            if (!removed) continue;
            double best = 0.0;
            double second = 0.0;
            for (const Track& track : tracks_) {
                if (track.status != TrackStatus::confirmed) continue;
                const double overlap = iou(track.kf.current_rect(), det.box);
                if (overlap > best) {
                    second = best;
                    best = overlap;
                } else {
                    second = std::max(second, overlap);
                }
            }
            if (best >= 0.45 && second <= 0.25) inputs.push_back(det);
        }
    } else {
        inputs = detections;
        bank_.clear();
    }

    for (Track& track : tracks_) {
        track.kf.predict();
        track.time_since_update += 1;
    }

    // Gated Kalman/appearance assignment against the surviving detections.
    const auto pair_cost = [&](const Track& track, const DetectionBox& box) {
        const double maha = track.kf.gating_distance(KalmanBoxFilter::to_measurement(box.box));
        if (maha > config_.gate) return kInf;
        if (!track.embedding.empty() && !box.embedding.empty()) {
            return config_.lambda * maha +
                   (1.0 - config_.lambda) * cosine_distance(track.embedding, box.embedding);
        }
        return config_.lambda * maha;
    };

    assignment::CostMatrix costs(tracks_.size(), inputs.size());
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        for (std::size_t j = 0; j < inputs.size(); ++j) {
            costs.at(i, j) = pair_cost(tracks_[i], inputs[j]);
        }
    }
    const assignment::Matching matches = assignment::solve(costs);

    const auto apply_match = [&](Track& track, const DetectionBox& box) {
        track.kf.update(KalmanBoxFilter::to_measurement(box.box));
        track.time_since_update = 0;
        track.hits += 1;
        track.last_box = box;
        track.box_predicted = box.predicted;
        track.predict_streak = box.predicted ? track.predict_streak + 1 : 0;
        if (!box.predicted && !box.embedding.empty()) {
            // Predicted boxes carry the banked feature and leave the smoothed
            // embedding untouched, so it stays constant through an occlusion.
            if (track.embedding.empty()) {
                track.embedding = normalized(box.embedding);
            } else {
                std::vector<double> blended(track.embedding.size());
                for (std::size_t k = 0; k < blended.size(); ++k) {
                    blended[k] = config_.ema_alpha * track.embedding[k] +
                                 (1.0 - config_.ema_alpha) * box.embedding[k];
                }
                track.embedding = normalized(std::move(blended));
            }
        }
        if (track.status == TrackStatus::tentative && track.hits >= config_.n_init) {
            track.status = TrackStatus::confirmed;
        }
    };

    std::vector<bool> track_matched(tracks_.size(), false);
    std::vector<bool> input_matched(inputs.size(), false);
    for (const auto& [i, j] : matches) {
        track_matched[i] = true;
        input_matched[j] = true;
        apply_match(tracks_[i], inputs[j]);
    }

    // IoU rescue stage for leftovers; re-acquires tracks whose tight motion
    // gate rejects a detection that still overlaps them.
    {
        std::vector<std::size_t> free_tracks, free_inputs;
        for (std::size_t i = 0; i < tracks_.size(); ++i) {
            if (!track_matched[i]) free_tracks.push_back(i);
        }
        for (std::size_t j = 0; j < inputs.size(); ++j) {
            if (!input_matched[j]) free_inputs.push_back(j);
        }
        if (!free_tracks.empty() && !free_inputs.empty()) {
            assignment::CostMatrix iou_costs(free_tracks.size(), free_inputs.size());
            for (std::size_t a = 0; a < free_tracks.size(); ++a) {
                const Rect track_rect = tracks_[free_tracks[a]].kf.current_rect();
                for (std::size_t b = 0; b < free_inputs.size(); ++b) {
                    const double overlap = iou(track_rect, inputs[free_inputs[b]].box);
                    iou_costs.at(a, b) =
                        overlap >= config_.iou_match_threshold ? 1.0 - overlap : kInf;
                }
            }
            for (const auto& [a, b] : assignment::solve(iou_costs)) {
                track_matched[free_tracks[a]] = true;
                input_matched[free_inputs[b]] = true;
                apply_match(tracks_[free_tracks[a]], inputs[free_inputs[b]]);
            }
        }
    }

    // Step 2: occluded confirmed tracks that found no detection run on a
    // predicted box instead: AIS displacement when the pair is bound, visual
    // motion otherwise, paired with the banked pre-occlusion feature. The
    // area test starts an occlusion; once predicting, a track keeps its
    // budget until a real detection takes over, so a dissolving area cannot
    // strand a vessel that is still hidden.
    if (config_.anti_occlusion) {
        for (std::size_t i = 0; i < tracks_.size(); ++i) {
            Track& track = tracks_[i];
            if (track_matched[i] || track.status != TrackStatus::confirmed) continue;
            const geo::PixelPoint c = track.last_box.box.center();
            const bool in_area =
                std::any_of(oar_.begin(), oar_.end(),
                            [&](const OcclusionArea& a) { return a.rect.contains(c); });
            const bool continuing = track.predict_streak > 0 &&
                                    track.predict_streak < config_.occlusion_predict_max_ticks;
            if (!in_area && !continuing) continue;

            std::optional<DetectionBox> box;
            const auto bound = bindings.find(track.id);
            if (bound != bindings.end()) {
                const auto traj = std::find_if(
                    t_ais.begin(), t_ais.end(),
                    [&](const ais::AisTrajectory& a) { return a.mmsi == bound->second; });
                if (traj != t_ais.end()) box = predict_box_ais(track.last_box, *traj, t);
            }
            if (!box) box = predict_box_visual(track.last_box, track.times, track.anchors,
                                               config_.delta_s, t);
            const auto banked = bank_.find(track.id);
            if (banked != bank_.end()) box->embedding = banked->second;
            const geo::PixelPoint pc = box->box.center();
            const bool in_frame =
                config_.image_width <= 0 ||
                (pc.x >= 0.0 && pc.x < config_.image_width && pc.y >= 0.0 &&
                 pc.y < config_.image_height);
            if (in_frame &&
                iou(box->box, track.kf.current_rect()) >= config_.iou_match_threshold) {
                track_matched[i] = true;
                apply_match(track, *box);
            }
        }
    }

    // New tentative tracks from unmatched real detections.
    for (std::size_t j = 0; j < inputs.size(); ++j) {
        if (input_matched[j]) continue;
        Track track;
        track.id = next_id_++;
        track.kf.initiate(KalmanBoxFilter::to_measurement(inputs[j].box));
        track.status = TrackStatus::tentative;
        track.hits = 1;
        track.time_since_update = 0;
        track.last_box = inputs[j];
        track.box_predicted = false;
        if (!inputs[j].embedding.empty()) track.embedding = normalized(inputs[j].embedding);
        tracks_.push_back(std::move(track));
        track_matched.push_back(true);
    }

    // Lifecycle and anchor history. Coasting confirmed tracks extend their
    // history with the filter estimate so it stays gap-free while live.
    std::vector<Track> survivors;
    survivors.reserve(tracks_.size());
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        Track& track = tracks_[i];
        const bool matched = track_matched[i];
        if (!matched && track.status == TrackStatus::tentative) continue;
        if (track.time_since_update > config_.max_age) continue;
        const Rect current = matched ? track.last_box.box : track.kf.current_rect();
        track.times.push_back(t);
        track.anchors.push_back(anchor_of(current));
        while (!track.times.empty() && track.times.front() < t - config_.retention_s) {
            track.times.erase(track.times.begin());
            track.anchors.erase(track.anchors.begin());
        }
        survivors.push_back(std::move(track));
    }
    tracks_ = std::move(survivors);

    // Occlusion areas for the next tick, from current confirmed-track boxes.
    // A group in which nobody saw a real detection this tick is a phantom
    // kept alive by its own predictions and gets dropped.
    if (config_.anti_occlusion) {
        std::vector<Rect> rects;
        std::vector<int> ids;
        std::set<int> real_matched;
        for (const Track& track : tracks_) {
            if (track.status != TrackStatus::confirmed) continue;
            rects.push_back(track.time_since_update == 0 ? track.last_box.box
                                                         : track.kf.current_rect());
            ids.push_back(track.id);
            if (track.time_since_update == 0 && !track.box_predicted) {
                real_matched.insert(track.id);
            }
        }
        oar_ = detect_occlusion_areas(rects, config_.omega, &ids);
        std::erase_if(oar_, [&](const OcclusionArea& area) {
            return std::none_of(area.member_track_ids.begin(), area.member_track_ids.end(),
                                [&](int id) { return real_matched.contains(id); });
        });
        std::vector<VisualTrack> views;
        views.reserve(tracks_.size());
        for (const Track& track : tracks_) views.push_back(view_of(track));
        bank_ = update_feature_bank(bank_, views, oar_);
    }

    StepResult result;
    result.tracks.reserve(tracks_.size());
    for (const Track& track : tracks_) result.tracks.push_back(view_of(track));
    result.occlusion_areas = oar_;
    result.feature_bank = bank_;
    return result;
}

} // namespace vesselfuse::tracking
