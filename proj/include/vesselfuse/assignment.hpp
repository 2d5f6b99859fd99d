#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace vesselfuse::assignment {

// Rectangular cost grid over extended reals: +inf forbids a pairing, -inf
// forces one. At most one -inf per row and per column.
class CostMatrix {
public:
    CostMatrix() = default;
    CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

using Matching = std::vector<std::pair<std::size_t, std::size_t>>;

// Minimum-cost assignment: maximum-cardinality matching over admissible cells,
// minimum total cost among those, lexicographically smallest pair sequence on
// ties. Every -inf cell is included; rows/columns with only +inf stay
// unmatched. Throws std::invalid_argument when two -inf cells share a row or
// column.
Matching solve(const CostMatrix& costs);

// Exhaustive oracle under the same constraints; refuses min(rows, cols) > 8.
Matching brute_force(const CostMatrix& costs);

// Total finite cost of a matching (forced -inf pairs contribute zero).
double matching_cost(const CostMatrix& costs, const Matching& matching);

} // namespace vesselfuse::assignment
