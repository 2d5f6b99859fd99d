#include "vesselfuse/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vesselfuse::dtw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double point_dist(const geo::PixelPoint& a, const geo::PixelPoint& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Inclusive column range per row; the search window for the constrained DP.
using Window = std::vector<std::pair<std::size_t, std::size_t>>;

Window full_window(std::size_t p_len, std::size_t q_len) {
    return Window(p_len, {0, q_len - 1});
}

// DP over the windowed alignment matrix with backtracking. Tie-break order:
// diagonal, then (p-1,q), then (p,q-1), so identical series walk the diagonal.
AlignResult align_windowed(const PixelSeries& x, const PixelSeries& y, const Window& window) {
    const std::size_t p_len = x.points.size();
    const std::size_t q_len = y.points.size();

    std::vector<std::size_t> offset(p_len);
    std::size_t total = 0;
    for (std::size_t p = 0; p < p_len; ++p) {
        offset[p] = total;
        total += window[p].second - window[p].first + 1;
    }
    std::vector<double> acc(total, kInf);

    const auto cell = [&](std::size_t p, std::size_t q) -> double& {
        return acc[offset[p] + (q - window[p].first)];
    };
    const auto in_window = [&](std::size_t p, std::size_t q) {
        return q >= window[p].first && q <= window[p].second;
    };
    const auto cost_at = [&](std::size_t p, std::size_t q) {
        return in_window(p, q) ? cell(p, q) : kInf;
    };

    for (std::size_t p = 0; p < p_len; ++p) {
        for (std::size_t q = window[p].first; q <= window[p].second; ++q) {
            const double d = point_dist(x.points[p], y.points[q]);
            if (p == 0 && q == 0) {
                cell(p, q) = d;
                continue;
            }
            double best = kInf;
            if (p > 0 && q > 0) best = std::min(best, cost_at(p - 1, q - 1));
            if (p > 0) best = std::min(best, cost_at(p - 1, q));
            if (q > 0) best = std::min(best, cost_at(p, q - 1));
            cell(p, q) = d + best;
        }
    }

    AlignResult result;
    result.distance = cell(p_len - 1, q_len - 1);

    std::size_t p = p_len - 1;
    std::size_t q = q_len - 1;
    result.path.pairs.emplace_back(p, q);
    while (p > 0 || q > 0) {
        const double diag = (p > 0 && q > 0) ? cost_at(p - 1, q - 1) : kInf;
        const double up = (p > 0) ? cost_at(p - 1, q) : kInf;
        const double left = (q > 0) ? cost_at(p, q - 1) : kInf;
        const double best = std::min({diag, up, left});
        if (diag == best) {
            --p;
            --q;
        } else if (up == best) {
            --p;
        } else {
            --q;
        }
        result.path.pairs.emplace_back(p, q);
    }
    std::reverse(result.path.pairs.begin(), result.path.pairs.end());
    return result;
}

PixelSeries coarsen(const PixelSeries& s) {
    PixelSeries out;
    const std::size_t n = s.points.size();
    out.points.reserve((n + 1) / 2);
    const bool has_times = s.times.size() == n;
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        out.points.push_back({(s.points[i].x + s.points[i + 1].x) / 2.0,
                              (s.points[i].y + s.points[i + 1].y) / 2.0});
        if (has_times) out.times.push_back((s.times[i] + s.times[i + 1]) / 2.0);
    }
    if (n % 2 == 1) {
        out.points.push_back(s.points[n - 1]);
        if (has_times) out.times.push_back(s.times[n - 1]);
    }
    return out;
}

// Projects a coarse-resolution path into fine-resolution column ranges and
// expands it by `radius` cells in every direction.
Window expand_window(const WarpPath& coarse_path, std::size_t p_len, std::size_t q_len,
                     int radius) {
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::pair<std::size_t, std::size_t>> projected(p_len, {none, 0});

    const auto mark = [&](std::size_t p, std::size_t q) {
        if (p >= p_len) return;
        const std::size_t qc = std::min(q, q_len - 1);
        auto& [lo, hi] = projected[p];
        lo = (lo == none) ? qc : std::min(lo, qc);
        hi = std::max(hi, qc);
    };
    for (const auto& [cp, cq] : coarse_path.pairs) {
        for (std::size_t dp = 0; dp < 2; ++dp) {
            for (std::size_t dq = 0; dq < 2; ++dq) {
                mark(2 * cp + dp, 2 * cq + dq);
            }
        }
    }
    // Rows beyond the projected image of the coarse path inherit the last range.
    std::pair<std::size_t, std::size_t> prev{0, 0};
    for (std::size_t p = 0; p < p_len; ++p) {
        if (projected[p].first == none) projected[p] = prev;
        prev = projected[p];
    }

    Window window(p_len);
    const auto r = static_cast<std::size_t>(radius);
    for (std::size_t p = 0; p < p_len; ++p) {
        const std::size_t row_lo = (p > r) ? p - r : 0;
        const std::size_t row_hi = std::min(p + r, p_len - 1);
        std::size_t lo = q_len - 1;
        std::size_t hi = 0;
        for (std::size_t pr = row_lo; pr <= row_hi; ++pr) {
            lo = std::min(lo, projected[pr].first);
            hi = std::max(hi, projected[pr].second);
        }
        window[p] = {(lo > r) ? lo - r : 0, std::min(hi + r, q_len - 1)};
    }
    // DP needs contiguous reachability between consecutive rows.
    for (std::size_t p = 1; p < p_len; ++p) {
        window[p].first = std::min(window[p].first, window[p - 1].second);
    }
    window[0].first = 0;
    window[p_len - 1].second = q_len - 1;
    return window;
}

AlignResult fastdtw_impl(const PixelSeries& x, const PixelSeries& y, int radius) {
    const std::size_t min_series = static_cast<std::size_t>(radius) + 2;
    if (x.points.size() <= min_series || y.points.size() <= min_series) {
        return align_windowed(x, y, full_window(x.points.size(), y.points.size()));
    }
    const PixelSeries shrunk_x = coarsen(x);
    const PixelSeries shrunk_y = coarsen(y);
    const AlignResult coarse = fastdtw_impl(shrunk_x, shrunk_y, radius);
    const Window window = expand_window(coarse.path, x.points.size(), y.points.size(), radius);
    return align_windowed(x, y, window);
}

void require_non_empty(const PixelSeries& x, const PixelSeries& y, const char* who) {
    if (x.points.empty() || y.points.empty()) {
        throw std::invalid_argument(std::string(who) + ": empty series");
    }
}

} // namespace

bool is_valid_warp_path(const WarpPath& path, std::size_t p_len, std::size_t q_len) {
    const auto& w = path.pairs;
    const std::size_t c = w.size();
    if (c == 0 || p_len == 0 || q_len == 0) return false;
    if (c < std::max(p_len, q_len) || c >= p_len + q_len) return false;
    if (w.front() != std::make_pair<std::size_t, std::size_t>(0, 0)) return false;
    if (w.back().first != p_len - 1 || w.back().second != q_len - 1) return false;
    for (std::size_t i = 1; i < c; ++i) {
        const std::size_t dp = w[i].first - w[i - 1].first;
        const std::size_t dq = w[i].second - w[i - 1].second;
        if (w[i].first < w[i - 1].first || w[i].second < w[i - 1].second) return false;
        if (dp > 1 || dq > 1 || (dp == 0 && dq == 0)) return false;
    }
    return true;
}

AlignResult dtw_exact(const PixelSeries& x, const PixelSeries& y) {
    require_non_empty(x, y, "dtw_exact");
    return align_windowed(x, y, full_window(x.points.size(), y.points.size()));
}

AlignResult fastdtw(const PixelSeries& x, const PixelSeries& y, int radius) {
    require_non_empty(x, y, "fastdtw");
    if (radius < 0) {
        throw std::invalid_argument("fastdtw: radius must be >= 0");
    }
    return fastdtw_impl(x, y, radius);
}

double direction_angle(const PixelSeries& x, const PixelSeries& y) {
    require_non_empty(x, y, "direction_angle");
    const double ax = x.points.back().x - x.points.front().x;
    const double ay = x.points.back().y - x.points.front().y;
    const double bx = y.points.back().x - y.points.front().x;
    const double by = y.points.back().y - y.points.front().y;
    if ((ax == 0.0 && ay == 0.0) || (bx == 0.0 && by == 0.0)) {
        return 0.0;
    }
    return std::atan2(std::abs(ax * by - ay * bx), ax * bx + ay * by);
}

double e_fastdtw(const PixelSeries& x, const PixelSeries& y, int radius) {
    require_non_empty(x, y, "e_fastdtw");
    const AlignResult aligned = fastdtw(x, y, radius);
    return aligned.distance * std::exp(direction_angle(x, y));
}

} // namespace vesselfuse::dtw
