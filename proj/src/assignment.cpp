#include "vesselfuse/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace vesselfuse::assignment {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Value {
    std::size_t cardinality = 0;
    double cost = 0.0;
};

bool close(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

void validate_forced(const CostMatrix& m) {
    std::vector<bool> row_seen(m.rows(), false), col_seen(m.cols(), false);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m.at(i, j) == -kInf) {
                if (row_seen[i] || col_seen[j]) {
                    throw std::invalid_argument("assignment: conflicting forced (-inf) cells");
                }
                row_seen[i] = col_seen[j] = true;
            }
        }
    }
}

// Classic O(n^3) potentials Hungarian on a square finite matrix (1-based
// internals). Returns col -> row assignment.
std::vector<std::size_t> hungarian_square(const std::vector<std::vector<double>>& a) {
    const std::size_t n = a.size();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            std::size_t j1 = 0;
            double delta = kInf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    return p;
}

// Optimal (max cardinality, then min cost) value of the subproblem over rows
// and columns not masked out, together with one achieving matching.
Value solve_sub(const CostMatrix& m, const std::vector<bool>& row_gone,
                const std::vector<bool>& col_gone, Matching* matching_out) {
    Value value;
    std::vector<std::size_t> rows, cols;
    std::vector<bool> row_used(m.rows(), false), col_used(m.cols(), false);

    // Forced cells first; a masked partner makes the forced pair unsatisfiable.
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m.at(i, j) != -kInf) continue;
            if (row_gone[i] || col_gone[j]) continue;
            value.cardinality += 1;
            row_used[i] = col_used[j] = true;
            if (matching_out) matching_out->emplace_back(i, j);
        }
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (!row_gone[i] && !row_used[i]) rows.push_back(i);
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
        if (!col_gone[j] && !col_used[j]) cols.push_back(j);
    }
    if (rows.empty() || cols.empty()) return value;

    double finite_sum = 0.0;
    for (const std::size_t i : rows) {
        for (const std::size_t j : cols) {
            const double c = m.at(i, j);
            if (std::isfinite(c)) finite_sum += std::abs(c);
        }
    }
    const double big = finite_sum + 1.0;

    const std::size_t n = std::max(rows.size(), cols.size());
    std::vector<std::vector<double>> square(n, std::vector<double>(n, big));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const double cost = m.at(rows[r], cols[c]);
            if (std::isfinite(cost)) square[r][c] = cost;
        }
    }

    const std::vector<std::size_t> col_to_row = hungarian_square(square);
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t r = col_to_row[j] - 1;
        const std::size_t c = j - 1;
        if (r >= rows.size() || c >= cols.size()) continue;
        if (!std::isfinite(m.at(rows[r], cols[c]))) continue;
        value.cardinality += 1;
        value.cost += m.at(rows[r], cols[c]);
        if (matching_out) matching_out->emplace_back(rows[r], cols[c]);
    }
    return value;
}

} // namespace

Matching solve(const CostMatrix& costs) {
    validate_forced(costs);
    if (costs.rows() == 0 || costs.cols() == 0) return {};

    std::vector<bool> row_gone(costs.rows(), false), col_gone(costs.cols(), false);
    const Value target = solve_sub(costs, row_gone, col_gone, nullptr);

    // Fix pairs in lexicographic order, keeping the optimum reachable. A pair
    // survives when forcing it preserves both cardinality and total cost.
    Matching fixed;
    std::size_t fixed_card = 0;
    double fixed_cost = 0.0;
    for (std::size_t i = 0; i < costs.rows(); ++i) {
        for (std::size_t j = 0; j < costs.cols(); ++j) {
            if (col_gone[j]) continue;
            const double c = costs.at(i, j);
            if (c == kInf) continue;
            row_gone[i] = col_gone[j] = true;
            const Value rest = solve_sub(costs, row_gone, col_gone, nullptr);
            const double pair_cost = std::isfinite(c) ? c : 0.0;
            if (fixed_card + 1 + rest.cardinality == target.cardinality &&
                close(fixed_cost + pair_cost + rest.cost, target.cost)) {
                fixed.emplace_back(i, j);
                fixed_card += 1;
                fixed_cost += pair_cost;
                break;
            }
            row_gone[i] = col_gone[j] = false;
        }
    }
    return fixed;
}

Matching brute_force(const CostMatrix& costs) {
    if (std::min(costs.rows(), costs.cols()) > 8) {
        throw std::invalid_argument("brute_force: refusing matrices with min dimension > 8");
    }
    validate_forced(costs);
    if (costs.rows() == 0 || costs.cols() == 0) return {};

    // Columns whose -inf lives in a given row or below; rows with a -inf.
    std::vector<std::size_t> forced_col_of_row(costs.rows(), costs.cols());
    std::vector<std::size_t> forced_row_of_col(costs.cols(), costs.rows());
    for (std::size_t i = 0; i < costs.rows(); ++i) {
        for (std::size_t j = 0; j < costs.cols(); ++j) {
            if (costs.at(i, j) == -kInf) {
                forced_col_of_row[i] = j;
                forced_row_of_col[j] = i;
            }
        }
    }

    Matching best;
    std::size_t best_card = 0;
    double best_cost = 0.0;
    bool have_best = false;

    Matching current;
    std::vector<bool> col_used(costs.cols(), false);

    const auto consider = [&](std::size_t card, double cost) {
        if (!have_best || card > best_card || (card == best_card && cost < best_cost - 1e-12)) {
            best = current;
            best_card = card;
            best_cost = cost;
            have_best = true;
        }
    };

    // DFS in candidate order (columns ascending, then skip) so the first
    // optimum found is the lexicographically smallest.
    const std::function<void(std::size_t, std::size_t, double)> recurse =
        [&](std::size_t row, std::size_t card, double cost) {
            if (row == costs.rows()) {
                consider(card, cost);
                return;
            }
            if (forced_col_of_row[row] != costs.cols()) {
                const std::size_t j = forced_col_of_row[row];
                if (col_used[j]) return; // forced cell unsatisfiable on this branch
                col_used[j] = true;
                current.emplace_back(row, j);
                recurse(row + 1, card + 1, cost);
                current.pop_back();
                col_used[j] = false;
                return;
            }
            for (std::size_t j = 0; j < costs.cols(); ++j) {
                if (col_used[j]) continue;
                if (forced_row_of_col[j] != costs.rows()) continue; // reserved for its -inf row
                const double c = costs.at(row, j);
                if (!std::isfinite(c)) continue;
                col_used[j] = true;
                current.emplace_back(row, j);
                recurse(row + 1, card + 1, cost + c);
                current.pop_back();
                col_used[j] = false;
            }
            recurse(row + 1, card, cost); // leave this row unmatched
        };
    recurse(0, 0, 0.0);

    std::sort(best.begin(), best.end());
    return best;
}

double matching_cost(const CostMatrix& costs, const Matching& matching) {
    double total = 0.0;
    for (const auto& [i, j] : matching) {
        const double c = costs.at(i, j);
        if (std::isfinite(c)) total += c;
    }
    return total;
}

} // namespace vesselfuse::assignment
