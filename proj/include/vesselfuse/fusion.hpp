#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "vesselfuse/ais.hpp"
#include "vesselfuse/assignment.hpp"
#include "vesselfuse/config.hpp"
#include "vesselfuse/tracking.hpp"

namespace vesselfuse::fusion {

// (mmsi, track id) pairing key.
using Pair = std::pair<std::int64_t, int>;

struct MatchCount {
    int count = 0;
    double last_match_time = 0.0;
};
using MatchCounts = std::map<Pair, MatchCount>;

// One-to-one persistent bindings, sorted by mmsi.
using AssociationSet = std::vector<Pair>;

struct AisSnapshot {
    double lon = 0.0;
    double lat = 0.0;
    double sog_kn = 0.0;
    double cog_deg = 0.0;
    std::optional<double> heading_deg;
};

enum class Provenance { matched, associated, unmatched };

struct FusedAnnotation {
    double t = 0.0;
    int track_id = 0;
    std::optional<std::int64_t> mmsi; // present iff provenance != unmatched
    tracking::Rect box;
    bool box_predicted = false;
    std::optional<AisSnapshot> ais;
    Provenance provenance = Provenance::unmatched;
};

// Instrumentation for one tick: which cells paid a similarity evaluation and
// what the matcher produced.
struct TickStats {
    double t = 0.0;
    std::int64_t similarity_evaluations = 0;
    std::vector<Pair> evaluated_cells;
    std::vector<Pair> matched_pairs; // this tick's matching result
    std::vector<Pair> bindings_in;   // associations the tick started with
    double tick_seconds = 0.0;       // filled by the replay driver
};

// Gated similarity matrix over (AIS trajectories x visual trajectories):
// +inf beyond D_max, -inf for bound pairs, +inf for cells blocked by a
// binding, E-FastDTW elsewhere. Bound rows/columns never pay a DTW call.
assignment::CostMatrix build_similarity_matrix(const std::vector<ais::AisTrajectory>& t_ais,
                                               const std::vector<tracking::VisualTrack>& t_vis,
                                               const AssociationSet& bindings, double d_max,
                                               int radius, bool normalize, TickStats* stats);

// Increments matched pairs (new pairs start at 1) and carries unmatched ones
// while their last match is strictly younger than t_max seconds.
MatchCounts update_counts(const MatchCounts& last, const std::vector<Pair>& matched, double now,
                          double t_max);

// Pairs with count strictly above mat_min, made one-to-one: higher count
// wins, ties break toward the lower mmsi then lower track id.
AssociationSet promote_associations(const MatchCounts& counts, int mat_min);

// The per-second fusion state machine.
class Engine {
public:
    explicit Engine(config::EngineConfig config);

    // One 1 Hz step: AIS store update and projection, anti-occlusion
    // tracking, gated matching, count/association bookkeeping, annotations.
    // Throws std::invalid_argument on out-of-order ticks (state unchanged).
    std::vector<FusedAnnotation> tick(double t, const std::vector<ais::AisRecord>& ais_batch,
                                      const std::vector<tracking::DetectionBox>& detections);

    const config::EngineConfig& config() const { return config_; }
    const ais::AisStore& store() const { return store_; }
    const tracking::Tracker& tracker() const { return tracker_; }
    const MatchCounts& counts() const { return counts_; }
    const AssociationSet& associations() const { return associations_; }
    const TickStats& last_stats() const { return stats_; }

private:
    config::EngineConfig config_;
    ais::AisStore store_;
    tracking::Tracker tracker_;
    MatchCounts counts_;
    AssociationSet associations_;
    TickStats stats_;
    double last_t_ = -1.0;
    bool ticked_ = false;
};

} // namespace vesselfuse::fusion
