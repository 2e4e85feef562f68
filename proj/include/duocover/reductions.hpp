#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "core.hpp"
#include "solver.hpp"

namespace duocover {

/// Pick at most m elements of {0..universe_size-1} meeting every set.
struct HittingSetInstance {
    std::size_t universe_size = 0;
    std::vector<std::vector<std::size_t>> sets;
    std::size_t m = 0;

    void validate() const {
        if (m == 0 || m > universe_size) throw ParameterError("hitting set budget must lie in [1, |S|]");
        for (const auto& set : sets)
            for (auto e : set)
                if (e >= universe_size) throw ParameterError("hitting set element out of range");
    }
};

/// Single coverage decision: k columns of B so that the sum over rows of the
/// cheapest open column is at most phi.
struct ScpInstance {
    CostMatrix costs;  // |A| x |B|
    std::size_t k = 0;
    double phi = 0.0;
};

/// Double coverage decision instance produced from an SCP instance.
struct DcpDecisionInstance {
    CostMatrix costs;  // |A| x (|B| + 1), the extra column last
    std::size_t k = 0;
    double phi = 0.0;
    double beta = 0.0;  // cost of the extra column for every row
};

/// Rows are sets, columns are elements; cost 0 when the element is in the set.
inline ScpInstance hitting_set_to_scp(const HittingSetInstance& hs) {
    hs.validate();
    const std::size_t rows = hs.sets.size();
    const std::size_t cols = hs.universe_size;
    std::vector<double> data(rows * cols, 1.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (auto e : hs.sets[i]) data[i * cols + e] = 0.0;
    return {CostMatrix(rows, cols, std::move(data)), hs.m, 0.0};
}

/// A value strictly below every entry: min - max(1, |min| * 1e-3).
inline double reduction_beta(const CostMatrix& costs) {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < costs.rows(); ++i)
        for (std::size_t j = 0; j < costs.cols(); ++j) lowest = std::min(lowest, costs(i, j));
    if (!std::isfinite(lowest)) return -1.0;
    return lowest - std::max(1.0, std::abs(lowest) * 1e-3);
}

/// Appends a column costing beta for every row and opens one more node.
inline DcpDecisionInstance scp_to_dcp(const ScpInstance& scp) {
    const std::size_t rows = scp.costs.rows();
    const std::size_t cols = scp.costs.cols();
    const double beta = reduction_beta(scp.costs);
    std::vector<double> data(rows * (cols + 1));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) data[i * (cols + 1) + j] = scp.costs(i, j);
        data[i * (cols + 1) + cols] = beta;
    }
    return {CostMatrix(rows, cols + 1, std::move(data)), scp.k + 1,
            scp.phi + static_cast<double>(rows) * beta, beta};
}

struct ScpSolution {
    bool yes = false;
    double value = 0.0;  // minimum total cheapest-allocation cost over k-subsets
    std::vector<SiteId> open;
};

inline constexpr std::size_t kScpEnumerationLimit = 20;

/// Exact SCP by enumerating all k-subsets of the columns (|B| <= 20).
inline ScpSolution solve_scp(const ScpInstance& scp) {
    const std::size_t cols = scp.costs.cols();
    const std::size_t rows = scp.costs.rows();
    if (cols > kScpEnumerationLimit) throw ParameterError("SCP enumeration is limited to 20 columns");
    if (scp.k == 0 || scp.k > cols) throw ParameterError("SCP budget must lie in [1, |B|]");

    ScpSolution best;
    best.value = std::numeric_limits<double>::infinity();
    std::vector<SiteId> pick(scp.k);
    for (std::size_t p = 0; p < scp.k; ++p) pick[p] = p;
    while (true) {
        double total = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            double cheapest = std::numeric_limits<double>::infinity();
            for (auto j : pick) cheapest = std::min(cheapest, scp.costs(i, j));
            total += cheapest;
        }
        if (total < best.value) {
            best.value = total;
            best.open = pick;
        }
        // Next combination in lexicographic order.
        std::size_t p = scp.k;
        while (p > 0 && pick[p - 1] == cols - scp.k + p - 1) --p;
        if (p == 0) break;
        ++pick[p - 1];
        for (std::size_t q = p; q < scp.k; ++q) pick[q] = pick[q - 1] + 1;
    }
    best.yes = best.value <= scp.phi;
    return best;
}

struct DcpSolution {
    bool yes = false;
    SolveResult result;
};

/// DCP decision through the exact branch-and-bound solver.
inline DcpSolution solve_dcp(const DcpDecisionInstance& dcp, const SolveOptions& options = {}) {
    DcpSolution out;
    out.result = solve_exact(dcp.costs, dcp.k, options);
    out.yes = out.result.status == SolveStatus::Optimal && out.result.allocation->total_cost <= dcp.phi;
    return out;
}

}  // namespace duocover
