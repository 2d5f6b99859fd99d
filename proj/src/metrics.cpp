#include "vesselfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "vesselfuse/assignment.hpp"
#include "vesselfuse/errors.hpp"

namespace vesselfuse::metrics {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double mofa(std::int64_t fn, std::int64_t fp, std::int64_t gt) {
    if (gt <= 0) throw undefined_metric("mofa: no ground truth");
    return 1.0 - static_cast<double>(fn + fp) / static_cast<double>(gt);
}

IdScores id_scores(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
    if (tp + fp <= 0 || tp + fn <= 0 || 2 * tp + fp + fn <= 0) {
        throw undefined_metric("id_scores: zero denominator");
    }
    return IdScores{
        static_cast<double>(tp) / static_cast<double>(tp + fp),
        static_cast<double>(tp) / static_cast<double>(tp + fn),
        static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn),
    };
}

std::pair<double, double> precision_recall(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
    if (tp + fp <= 0 || tp + fn <= 0) {
        throw undefined_metric("precision_recall: zero denominator");
    }
    return {static_cast<double>(tp) / static_cast<double>(tp + fp),
            static_cast<double>(tp) / static_cast<double>(tp + fn)};
}

double mota(std::int64_t fp, std::int64_t fn, std::int64_t id_switches, std::int64_t gt) {
    if (gt <= 0) throw undefined_metric("mota: no ground truth");
    return 1.0 - static_cast<double>(fp + fn + id_switches) / static_cast<double>(gt);
}

double mofp(const std::vector<double>& distances) {
    if (distances.empty()) throw undefined_metric("mofp: no matches");
    double sum = 0.0;
    for (const double d : distances) sum += d;
    return sum / static_cast<double>(distances.size());
}

std::vector<std::pair<std::size_t, std::size_t>> match_predictions(
    const std::vector<tracking::Rect>& preds, const std::vector<tracking::Rect>& gts,
    double iou_threshold) {
    assignment::CostMatrix costs(preds.size(), gts.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        for (std::size_t j = 0; j < gts.size(); ++j) {
            const double overlap = tracking::iou(preds[i], gts[j]);
            costs.at(i, j) = overlap >= iou_threshold ? -overlap : kInf;
        }
    }
    return assignment::solve(costs);
}

Counters evaluate_counters(const std::vector<PredictionRecord>& preds,
                           const std::vector<GroundTruthRecord>& gts, double iou_threshold,
                           double image_diagonal_px) {
    Counters c;
    std::map<double, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> ticks;
    for (std::size_t i = 0; i < preds.size(); ++i) ticks[preds[i].t].first.push_back(i);
    for (std::size_t j = 0; j < gts.size(); ++j) ticks[gts[j].t].second.push_back(j);

    std::map<int, int> last_match; // gt track id -> last matched prediction track id

    for (const auto& [t, indices] : ticks) {
        const auto& [pred_idx, gt_idx] = indices;

        // Box level: every reported box against every in-view truth box.
        std::vector<tracking::Rect> pred_boxes, gt_boxes;
        for (const std::size_t i : pred_idx) pred_boxes.push_back(preds[i].box);
        for (const std::size_t j : gt_idx) gt_boxes.push_back(gts[j].box);
        const auto box_pairs = match_predictions(pred_boxes, gt_boxes, iou_threshold);
        c.tp_box += static_cast<std::int64_t>(box_pairs.size());
        c.fp_box += static_cast<std::int64_t>(pred_boxes.size() - box_pairs.size());
        c.fn_box += static_cast<std::int64_t>(gt_boxes.size() - box_pairs.size());
        c.gt_boxes += static_cast<std::int64_t>(gt_boxes.size());

        for (const auto& [pi, gj] : box_pairs) {
            const int gt_track = gts[gt_idx[gj]].track_id;
            const int pred_track = preds[pred_idx[pi]].track_id;
            const auto it = last_match.find(gt_track);
            if (it != last_match.end() && it->second != pred_track) c.id_switches += 1;
            last_match[gt_track] = pred_track;
        }

        // MMSI level: predictions carrying an identity against truth with one.
        std::vector<std::size_t> mp, mg;
        std::vector<tracking::Rect> mp_boxes, mg_boxes;
        for (const std::size_t i : pred_idx) {
            if (preds[i].mmsi.has_value()) {
                mp.push_back(i);
                mp_boxes.push_back(preds[i].box);
            }
        }
        for (const std::size_t j : gt_idx) {
            if (gts[j].mmsi > 0) {
                mg.push_back(j);
                mg_boxes.push_back(gts[j].box);
            }
        }
        const auto id_pairs = match_predictions(mp_boxes, mg_boxes, iou_threshold);
        std::int64_t tp_now = 0;
        for (const auto& [pi, gj] : id_pairs) {
            const PredictionRecord& p = preds[mp[pi]];
            const GroundTruthRecord& g = gts[mg[gj]];
            if (*p.mmsi == g.mmsi) {
                tp_now += 1;
                const auto pc = p.box.center();
                const auto gc = g.box.center();
                c.mofp_distances.push_back(std::hypot(pc.x - gc.x, pc.y - gc.y) /
                                           image_diagonal_px);
            }
        }
        c.tp_id += tp_now;
        c.fp_id += static_cast<std::int64_t>(mp.size()) - tp_now;
        c.fn_id += static_cast<std::int64_t>(mg.size()) - tp_now;
        c.gt_mmsi += static_cast<std::int64_t>(mg.size());
    }
    return c;
}

FusionReport build_report(const Counters& counters) {
    FusionReport report;
    report.counters = counters;
    try {
        report.mofa = mofa(counters.fn_id, counters.fp_id, counters.gt_mmsi);
    } catch (const undefined_metric&) {
    }
    try {
        const IdScores s = id_scores(counters.tp_id, counters.fp_id, counters.fn_id);
        report.idp = s.idp;
        report.idr = s.idr;
        report.idf1 = s.idf1;
    } catch (const undefined_metric&) {
    }
    try {
        const auto [p, r] = precision_recall(counters.tp_box, counters.fp_box, counters.fn_box);
        report.precision = p;
        report.recall = r;
    } catch (const undefined_metric&) {
    }
    try {
        report.mota =
            mota(counters.fp_box, counters.fn_box, counters.id_switches, counters.gt_boxes);
    } catch (const undefined_metric&) {
    }
    try {
        report.mofp = mofp(counters.mofp_distances);
    } catch (const undefined_metric&) {
    }
    return report;
}

} // namespace vesselfuse::metrics
