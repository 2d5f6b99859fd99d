#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "vesselfuse/tracking.hpp"

namespace vesselfuse::metrics {

struct GroundTruthRecord {
    double t = 0.0;
    std::int64_t mmsi = 0; // 0 = vessel without AIS truth
    int track_id = 0;
    tracking::Rect box;
};

// One reported box at one tick (parsed back from the annotation stream).
struct PredictionRecord {
    double t = 0.0;
    int track_id = 0;
    std::optional<std::int64_t> mmsi;
    tracking::Rect box;
};

double mofa(std::int64_t fn, std::int64_t fp, std::int64_t gt);

struct IdScores {
    double idp = 0.0;
    double idr = 0.0;
    double idf1 = 0.0;
};
IdScores id_scores(std::int64_t tp, std::int64_t fp, std::int64_t fn);

std::pair<double, double> precision_recall(std::int64_t tp, std::int64_t fp, std::int64_t fn);

double mota(std::int64_t fp, std::int64_t fn, std::int64_t id_switches, std::int64_t gt);

// Mean matched-pair distance (callers normalize the distances beforehand).
double mofp(const std::vector<double>& distances);

// IoU-optimal correspondence between two box lists of the same tick: Hungarian
// on -IoU with pairs below the threshold left unmatched.
std::vector<std::pair<std::size_t, std::size_t>> match_predictions(
    const std::vector<tracking::Rect>& preds, const std::vector<tracking::Rect>& gts,
    double iou_threshold = 0.5);

struct Counters {
    // MMSI-labelled fusion level
    std::int64_t tp_id = 0;
    std::int64_t fp_id = 0;
    std::int64_t fn_id = 0;
    std::int64_t gt_mmsi = 0;
    // box detection level
    std::int64_t tp_box = 0;
    std::int64_t fp_box = 0;
    std::int64_t fn_box = 0;
    std::int64_t gt_boxes = 0;
    // tracking level
    std::int64_t id_switches = 0;
    std::vector<double> mofp_distances; // diagonal-normalized, correct-mmsi pairs
};

struct FusionReport {
    std::optional<double> mofa;
    std::optional<double> idp;
    std::optional<double> idr;
    std::optional<double> idf1;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> mota;
    std::optional<double> mofp;
    Counters counters;
};

// Per-second evaluation of a prediction stream against ground truth.
// image_diagonal_px normalizes localization distances.
Counters evaluate_counters(const std::vector<PredictionRecord>& preds,
                           const std::vector<GroundTruthRecord>& gts, double iou_threshold,
                           double image_diagonal_px);

FusionReport build_report(const Counters& counters);

} // namespace vesselfuse::metrics
