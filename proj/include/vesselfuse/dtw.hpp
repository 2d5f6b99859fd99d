#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "vesselfuse/geo.hpp"

namespace vesselfuse::dtw {

// A pixel trajectory sampled at non-decreasing timestamps. Timestamps ride
// along for bookkeeping; alignment cost uses point geometry only.
struct PixelSeries {
    std::vector<geo::PixelPoint> points;
    std::vector<double> times; // parallel to points; may be empty
};

// Monotone alignment between two series, 0-based index pairs.
struct WarpPath {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

struct AlignResult {
    double distance = 0.0;
    WarpPath path;
};

// Checks the three warp-path restrictions: endpoints (0,0)/(P-1,Q-1),
// steps in {(1,0),(0,1),(1,1)}, monotone non-decreasing indexes,
// and max(P,Q) <= C < P+Q.
bool is_valid_warp_path(const WarpPath& path, std::size_t p_len, std::size_t q_len);

// Exact dynamic-programming alignment, Euclidean point cost.
AlignResult dtw_exact(const PixelSeries& x, const PixelSeries& y);

// Multilevel coarsen/project/refine approximation; equals dtw_exact whenever
// radius >= max(P, Q).
AlignResult fastdtw(const PixelSeries& x, const PixelSeries& y, int radius);

// Angle in [0, pi] between the end-to-end displacement vectors; 0 when either
// series has no net displacement.
double direction_angle(const PixelSeries& x, const PixelSeries& y);

// Similarity score: fastdtw distance scaled by e^angle. Lower is more similar.
double e_fastdtw(const PixelSeries& x, const PixelSeries& y, int radius);

} // namespace vesselfuse::dtw
