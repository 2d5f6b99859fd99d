#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "vesselfuse/dtw.hpp"
#include "vesselfuse/rng.hpp"

using namespace vesselfuse;
using dtw::PixelSeries;

namespace {

PixelSeries series(std::initializer_list<std::pair<double, double>> pts) {
    PixelSeries s;
    for (const auto& [x, y] : pts) s.points.push_back({x, y});
    return s;
}

PixelSeries random_series(Rng& rng, std::size_t n) {
    PixelSeries s;
    double x = rng.uniform(0.0, 100.0);
    double y = rng.uniform(0.0, 100.0);
    for (std::size_t i = 0; i < n; ++i) {
        x += rng.normal(0.0, 5.0);
        y += rng.normal(0.0, 5.0);
        s.points.push_back({x, y});
    }
    return s;
}

// Exhaustive warp-path enumeration for tiny inputs; the independent check on
// the dynamic program.
double enumerate_min_cost(const PixelSeries& x, const PixelSeries& y) {
    const std::size_t p_len = x.points.size();
    const std::size_t q_len = y.points.size();
    const auto d = [&](std::size_t p, std::size_t q) {
        return std::hypot(x.points[p].x - y.points[q].x, x.points[p].y - y.points[q].y);
    };
    double best = std::numeric_limits<double>::infinity();
    const std::function<void(std::size_t, std::size_t, double)> walk =
        [&](std::size_t p, std::size_t q, double cost) {
            cost += d(p, q);
            if (cost >= best) return;
            if (p == p_len - 1 && q == q_len - 1) {
                best = cost;
                return;
            }
            if (p + 1 < p_len && q + 1 < q_len) walk(p + 1, q + 1, cost);
            if (p + 1 < p_len) walk(p + 1, q, cost);
            if (q + 1 < q_len) walk(p, q + 1, cost);
        };
    walk(0, 0, 0.0);
    return best;
}

} // namespace

TEST_CASE("dtw_exact: identical series give zero along the diagonal") {
    Rng rng(1);
    const PixelSeries x = random_series(rng, 17);
    const auto r = dtw::dtw_exact(x, x);
    CHECK(r.distance == 0.0);
    CHECK(r.path.pairs.size() == 17);
    for (std::size_t i = 0; i < r.path.pairs.size(); ++i) {
        CHECK(r.path.pairs[i] == std::pair<std::size_t, std::size_t>{i, i});
    }
}

TEST_CASE("dtw_exact: enumeration example") {
    const auto r = dtw::dtw_exact(series({{0, 0}, {1, 0}, {2, 0}}), series({{0, 0}, {2, 0}}));
    CHECK(r.distance == doctest::Approx(1.0));
    CHECK(dtw::is_valid_warp_path(r.path, 3, 2));
}

TEST_CASE("dtw_exact: time-shifted duplicates align for free") {
    const auto r = dtw::dtw_exact(series({{0, 0}, {1, 0}, {2, 0}, {3, 0}}),
                                  series({{0, 0}, {0, 0}, {1, 0}, {2, 0}, {3, 0}}));
    CHECK(r.distance == 0.0);
}

TEST_CASE("dtw_exact: rejects empty series") {
    CHECK_THROWS_AS(dtw::dtw_exact(PixelSeries{}, series({{0, 0}})), std::invalid_argument);
}

TEST_CASE("dtw_exact: equals exhaustive enumeration on small random pairs") {
    Rng rng(9);
    for (int i = 0; i < 150; ++i) {
        const auto x = random_series(rng, 1 + rng.uniform_int(0, 5));
        const auto y = random_series(rng, 1 + rng.uniform_int(0, 5));
        const auto r = dtw::dtw_exact(x, y);
        CHECK(r.distance ==
              doctest::Approx(enumerate_min_cost(x, y)).scale(1).epsilon(1e-9));
        CHECK(dtw::is_valid_warp_path(r.path, x.points.size(), y.points.size()));
    }
}

TEST_CASE("dtw_exact: symmetry and non-negativity") {
    Rng rng(13);
    for (int i = 0; i < 50; ++i) {
        const auto x = random_series(rng, 1 + rng.uniform_int(0, 20));
        const auto y = random_series(rng, 1 + rng.uniform_int(0, 20));
        const double xy = dtw::dtw_exact(x, y).distance;
        const double yx = dtw::dtw_exact(y, x).distance;
        CHECK(xy >= 0.0);
        CHECK(xy == doctest::Approx(yx).scale(1).epsilon(1e-12));
    }
}

TEST_CASE("fastdtw: full radius reproduces the exact solver") {
    Rng rng(21);
    for (int i = 0; i < 100; ++i) {
        const auto x = random_series(rng, 1 + rng.uniform_int(0, 63));
        const auto y = random_series(rng, 1 + rng.uniform_int(0, 63));
        const int radius = static_cast<int>(std::max(x.points.size(), y.points.size()));
        const auto fast = dtw::fastdtw(x, y, radius);
        const auto exact = dtw::dtw_exact(x, y);
        CHECK(fast.distance == exact.distance);
        CHECK(fast.path.pairs == exact.path.pairs);
    }
}

TEST_CASE("fastdtw: identical series cost zero at any radius") {
    Rng rng(23);
    const auto x = random_series(rng, 40);
    for (const int radius : {0, 1, 2, 5}) {
        CHECK(dtw::fastdtw(x, x, radius).distance == 0.0);
    }
}

TEST_CASE("fastdtw: radius-1 approximation stays close to exact") {
    Rng rng(31);
    int within = 0;
    int total = 0;
    for (int i = 0; i < 500; ++i) {
        const auto x = random_series(rng, 2 + rng.uniform_int(0, 30));
        const auto y = random_series(rng, 2 + rng.uniform_int(0, 30));
        const auto fast = dtw::fastdtw(x, y, 1);
        const auto exact = dtw::dtw_exact(x, y);
        CHECK(fast.distance >= exact.distance - 1e-9);
        CHECK(dtw::is_valid_warp_path(fast.path, x.points.size(), y.points.size()));
        total += 1;
        if (fast.distance <= 1.10 * exact.distance + 1e-9) within += 1;
    }
    CHECK(within >= 95 * total / 100);
}

TEST_CASE("warp path validator rejects malformed paths") {
    dtw::WarpPath p;
    p.pairs = {{0, 0}, {1, 1}};
    CHECK(dtw::is_valid_warp_path(p, 2, 2));
    p.pairs = {{0, 0}, {2, 1}};
    CHECK_FALSE(dtw::is_valid_warp_path(p, 3, 2));
    p.pairs = {{0, 0}, {1, 1}, {1, 1}};
    CHECK_FALSE(dtw::is_valid_warp_path(p, 2, 2));
    p.pairs = {{0, 1}, {1, 1}};
    CHECK_FALSE(dtw::is_valid_warp_path(p, 2, 2));
    p.pairs = {{0, 0}, {1, 0}};
    CHECK_FALSE(dtw::is_valid_warp_path(p, 2, 2)); // never reaches (P-1, Q-1)
}

TEST_CASE("direction_angle: canonical angles") {
    const auto east1 = series({{0, 0}, {10, 0}});
    const auto east2 = series({{5, 5}, {25, 5}});
    const auto west = series({{10, 0}, {0, 0}});
    const auto north = series({{0, 0}, {0, 10}});
    CHECK(dtw::direction_angle(east1, east2) == doctest::Approx(0.0));
    CHECK(dtw::direction_angle(east1, west) == doctest::Approx(M_PI));
    CHECK(dtw::direction_angle(east1, north) == doctest::Approx(M_PI / 2.0));
    const auto still = series({{3, 3}, {3, 3}});
    CHECK(dtw::direction_angle(east1, still) == 0.0);
}

TEST_CASE("e_fastdtw: direction factor forced by the formula") {
    const auto x = series({{0, 0}, {1, 0}, {2, 0}});
    const auto y = series({{0, 0}, {2, 0}});
    CHECK(dtw::e_fastdtw(x, y, 1) == doctest::Approx(1.0)); // Dis 1, angle 0

    const auto y_rev = series({{2, 0}, {0, 0}});
    const double dis = dtw::fastdtw(x, y_rev, 1).distance;
    CHECK(dtw::e_fastdtw(x, y_rev, 1) ==
          doctest::Approx(dis * std::exp(M_PI)).scale(1).epsilon(1e-12));
    CHECK(dtw::e_fastdtw(x, x, 5) == 0.0);
}

TEST_CASE("e_fastdtw: invariant under rigid translation of both series") {
    Rng rng(41);
    for (int i = 0; i < 30; ++i) {
        auto x = random_series(rng, 2 + rng.uniform_int(0, 20));
        auto y = random_series(rng, 2 + rng.uniform_int(0, 20));
        const double base = dtw::e_fastdtw(x, y, 1);
        const double dx = rng.uniform(-500.0, 500.0);
        const double dy = rng.uniform(-500.0, 500.0);
        for (auto& p : x.points) {
            p.x += dx;
            p.y += dy;
        }
        for (auto& p : y.points) {
            p.x += dx;
            p.y += dy;
        }
        CHECK(dtw::e_fastdtw(x, y, 1) == doctest::Approx(base).scale(1).epsilon(1e-9));
    }
}
