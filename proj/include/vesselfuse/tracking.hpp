#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "vesselfuse/ais.hpp"
#include "vesselfuse/geo.hpp"

namespace vesselfuse::tracking {

struct Rect {
    double x_tl = 0.0;
    double y_tl = 0.0;
    double x_br = 0.0;
    double y_br = 0.0;

    double width() const { return x_br - x_tl; }
    double height() const { return y_br - y_tl; }
    double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
    geo::PixelPoint center() const { return {(x_tl + x_br) / 2.0, (y_tl + y_br) / 2.0}; }
    bool contains(const geo::PixelPoint& p) const {
        return p.x >= x_tl && p.x <= x_br && p.y >= y_tl && p.y <= y_br;
    }
};

double intersection_area(const Rect& a, const Rect& b);
double iou(const Rect& a, const Rect& b);

struct DetectionBox {
    double t = 0.0;
    Rect box;
    double confidence = 1.0;
    std::vector<double> embedding; // unit norm when non-empty
    bool predicted = false;        // produced by anti-occlusion prediction
};

// Smallest rectangle around a group of mutually overlapping boxes.
struct OcclusionArea {
    Rect rect;
    std::set<int> member_track_ids;
};

// Stored pre-occlusion appearance embeddings, keyed by track id.
using FeatureBank = std::map<int, std::vector<double>>;

enum class TrackStatus { tentative, confirmed, lost };

struct VisualTrack {
    int id = 0;
    std::vector<double> times; // anchor history, strictly increasing
    std::vector<geo::PixelPoint> anchors;
    DetectionBox last_box;
    TrackStatus status = TrackStatus::tentative;
    int hits = 0;
    int time_since_update = 0;
    std::vector<double> smoothed_embedding;
    bool box_predicted = false;
    Eigen::Matrix<double, 8, 1> kalman_mean = Eigen::Matrix<double, 8, 1>::Zero();
    Eigen::Matrix<double, 8, 8> kalman_cov = Eigen::Matrix<double, 8, 8>::Zero();
};

// Group overlap ratio: largest pairwise intersection over the smallest member
// area. Needs at least two boxes.
double occlusion_ratio(const std::vector<Rect>& boxes);

// Connected overlap groups whose ratio strictly exceeds omega, as enclosing
// rectangles. `ids` (parallel to boxes, optional) fills member_track_ids.
std::vector<OcclusionArea> detect_occlusion_areas(const std::vector<Rect>& boxes, double omega,
                                                  const std::vector<int>* ids = nullptr);

// Drops every detection whose center lies inside any occlusion area.
std::vector<DetectionBox> remove_boxes_in_areas(const std::vector<DetectionBox>& boxes,
                                                const std::vector<OcclusionArea>& oar);

// Shifts the previous box by the AIS pixel displacement between t_now-1 and
// t_now; empty when the trajectory lacks either sample.
std::optional<DetectionBox> predict_box_ais(const DetectionBox& last_box,
                                            const ais::AisTrajectory& traj, double t_now);

// Shifts the previous box by the visual motion speed over the last delta
// seconds of anchor history (older point and actual span when history is
// shorter than delta).
DetectionBox predict_box_visual(const DetectionBox& last_box, const std::vector<double>& times,
                                const std::vector<geo::PixelPoint>& anchors, int delta_s,
                                double t_now);

// Keep-or-store for tracks currently occluded (previous box center inside an
// area); entries for tracks no longer occluded are dropped.
FeatureBank update_feature_bank(const FeatureBank& bank, const std::vector<VisualTrack>& tracks,
                                const std::vector<OcclusionArea>& oar);

// DeepSORT-style constant-velocity filter over (cx, cy, aspect, height).
class KalmanBoxFilter {
public:
    using Vec4 = Eigen::Matrix<double, 4, 1>;
    using Vec8 = Eigen::Matrix<double, 8, 1>;
    using Mat8 = Eigen::Matrix<double, 8, 8>;

    static Vec4 to_measurement(const Rect& box);
    static Rect to_rect(const Vec4& measurement);

    void initiate(const Vec4& measurement);
    void predict();
    void update(const Vec4& measurement);
    // Squared Mahalanobis distance of a measurement in the projected space.
    double gating_distance(const Vec4& measurement) const;

    const Vec8& mean() const { return mean_; }
    const Mat8& covariance() const { return cov_; }
    Rect current_rect() const { return to_rect(mean_.head<4>()); }

private:
    Vec8 mean_ = Vec8::Zero();
    Mat8 cov_ = Mat8::Zero();
};

struct TrackerConfig {
    double omega = 0.0;      // occlusion group threshold
    int delta_s = 5;         // visual motion lookback, seconds
    double lambda = 0.5;     // motion/appearance cost blend
    double gate = 9.4877;    // chi-square 0.95 quantile, 4 dof
    double iou_match_threshold = 0.3; // second-stage IoU rescue for leftovers
    int n_init = 2;          // consecutive hits to confirm
    int max_age = 5;         // coasting ticks before a confirmed track drops
    int occlusion_predict_max_ticks = 30; // prediction budget per occlusion
    double retention_s = 120.0;
    double ema_alpha = 0.9;  // smoothed-embedding momentum
    bool anti_occlusion = true;
    bool anchor_bottom_center = true; // false = box centroid
    int image_width = 0;  // >0 enables the frame-exit check on predicted boxes
    int image_height = 0;
};

// Anti-occlusion tracking-by-detection over 1 Hz ticks.
class Tracker {
public:
    explicit Tracker(TrackerConfig config = {}) : config_(config) {}

    struct StepResult {
        std::vector<VisualTrack> tracks; // live tracks after the update
        std::vector<OcclusionArea> occlusion_areas;
        FeatureBank feature_bank;
    };

    // One tick: removal, occluded-box prediction (AIS for bound tracks, visual
    // motion otherwise), feature-bank upkeep, then the gated
    // Kalman/appearance assignment update. `bindings` maps track id -> mmsi.
    StepResult step(double t, const std::vector<DetectionBox>& detections,
                    const std::vector<ais::AisTrajectory>& t_ais,
                    const std::map<int, std::int64_t>& bindings);

    const std::vector<OcclusionArea>& occlusion_areas() const { return oar_; }
    const FeatureBank& feature_bank() const { return bank_; }
    const TrackerConfig& config() const { return config_; }

private:
    struct Track {
        int id = 0;
        KalmanBoxFilter kf;
        TrackStatus status = TrackStatus::tentative;
        int hits = 0;
        int time_since_update = 0;
        int predict_streak = 0; // consecutive ticks lived on predicted boxes
        std::vector<double> times;
        std::vector<geo::PixelPoint> anchors;
        DetectionBox last_box;
        std::vector<double> embedding;
        bool box_predicted = false;
    };

    geo::PixelPoint anchor_of(const Rect& box) const;
    VisualTrack view_of(const Track& track) const;

    TrackerConfig config_;
    std::vector<Track> tracks_;
    std::vector<OcclusionArea> oar_;
    FeatureBank bank_;
    int next_id_ = 1;
    double last_t_ = -1.0;
};

} // namespace vesselfuse::tracking
