#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "vesselfuse/assignment.hpp"
#include "vesselfuse/rng.hpp"

using namespace vesselfuse;
using assignment::CostMatrix;
using assignment::Matching;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CostMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    CostMatrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (const double v : row) m.at(i, j++) = v;
        ++i;
    }
    return m;
}

// Random matrix with integer costs and sprinkled +inf / forced -inf cells.
CostMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    CostMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m.at(i, j) = rng.bernoulli(0.2) ? kInf
                                            : static_cast<double>(rng.uniform_int(0, 100));
        }
    }
    if (rng.bernoulli(0.3)) {
        const auto i = static_cast<std::size_t>(rng.uniform_int(0, rows - 1));
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, cols - 1));
        m.at(i, j) = -kInf;
    }
    return m;
}

bool is_partial_matching(const Matching& m) {
    std::set<std::size_t> rows, cols;
    for (const auto& [i, j] : m) {
        if (!rows.insert(i).second || !cols.insert(j).second) return false;
    }
    return true;
}

} // namespace

TEST_CASE("solve: diagonal dominance") {
    const Matching m = assignment::solve(from_rows({{0.0, 9.0}, {9.0, 0.0}}));
    REQUIRE(m.size() == 2);
    CHECK(m[0] == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(m[1] == std::pair<std::size_t, std::size_t>{1, 1});
}

TEST_CASE("solve: all forbidden yields the empty matching") {
    CHECK(assignment::solve(from_rows({{kInf, kInf}, {kInf, kInf}})).empty());
}

TEST_CASE("solve: forced cells always included, forbidden excluded") {
    const CostMatrix costs = from_rows({{5.0, -kInf, 1.0},
                                        {2.0, kInf, kInf},
                                        {kInf, 3.0, 0.5}});
    const Matching m = assignment::solve(costs);
    CHECK(is_partial_matching(m));
    bool has_forced = false;
    for (const auto& [i, j] : m) {
        CHECK(costs.at(i, j) != kInf);
        if (costs.at(i, j) == -kInf) has_forced = true;
    }
    CHECK(has_forced);
}

TEST_CASE("solve: conflicting forced cells throw") {
    CHECK_THROWS_AS(assignment::solve(from_rows({{-kInf, -kInf}, {1.0, 2.0}})),
                    std::invalid_argument);
    CHECK_THROWS_AS(assignment::solve(from_rows({{-kInf, 1.0}, {-kInf, 2.0}})),
                    std::invalid_argument);
}

TEST_CASE("solve: rows with only forbidden entries stay unmatched") {
    const Matching m = assignment::solve(from_rows({{kInf, kInf}, {1.0, 2.0}}));
    REQUIRE(m.size() == 1);
    CHECK(m[0] == std::pair<std::size_t, std::size_t>{1, 0});
}

TEST_CASE("brute force: size guard and basics") {
    CHECK_THROWS_AS(assignment::brute_force(CostMatrix(9, 9, 1.0)), std::invalid_argument);
    const Matching single = assignment::brute_force(from_rows({{4.0}}));
    REQUIRE(single.size() == 1);
    CHECK(single[0] == std::pair<std::size_t, std::size_t>{0, 0});

    const Matching forced = assignment::brute_force(from_rows({{5.0, -kInf}, {7.0, 6.0}}));
    CHECK(is_partial_matching(forced));
    CHECK(std::find(forced.begin(), forced.end(),
                    std::pair<std::size_t, std::size_t>{0, 1}) != forced.end());
}

TEST_CASE("solve equals brute force on random rectangular instances") {
    Rng rng(1234);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t rows = 1 + static_cast<std::size_t>(rng.uniform_int(0, 5));
        const std::size_t cols = 1 + static_cast<std::size_t>(rng.uniform_int(0, 6));
        const CostMatrix m = random_matrix(rng, rows, cols);
        const Matching fast = assignment::solve(m);
        const Matching slow = assignment::brute_force(m);
        CHECK(is_partial_matching(fast));
        CHECK(fast.size() == slow.size());
        CHECK(assignment::matching_cost(m, fast) == assignment::matching_cost(m, slow));
    }
}

TEST_CASE("solve: row-constant shift leaves the matching unchanged") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        CostMatrix m = random_matrix(rng, 4, 5);
        const Matching before = assignment::solve(m);
        const auto row = static_cast<std::size_t>(rng.uniform_int(0, 3));
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (std::isfinite(m.at(row, j))) m.at(row, j) += 17.0;
        }
        CHECK(assignment::solve(m) == before);
    }
}

TEST_CASE("solve: transpose symmetry up to the deterministic tie-break") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const CostMatrix m = random_matrix(rng, 4, 4);
        CostMatrix mt(m.cols(), m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) mt.at(j, i) = m.at(i, j);
        }
        const double cost = assignment::matching_cost(m, assignment::solve(m));
        const double cost_t = assignment::matching_cost(mt, assignment::solve(mt));
        CHECK(cost == doctest::Approx(cost_t));
    }
}
