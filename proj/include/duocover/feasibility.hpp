#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "candidates.hpp"
#include "core.hpp"
#include "rng.hpp"

namespace duocover {

/// Outcome of the double-cover decision problem.
struct FeasibilityResult {
    bool feasible = false;
    std::vector<SiteId> witness;      // |witness| = k, every site has two candidates in it
    std::vector<SiteId> certificate;  // sites whose restricted subproblem alone is infeasible
};

/// Rows sorted by how many other rows share a candidate with them, fewest
/// first. Greedy packing in this order finds many pairwise disjoint rows.
inline std::vector<std::size_t> packing_order(const std::vector<std::vector<SiteId>>& pos, std::size_t columns) {
    std::vector<std::vector<std::size_t>> col_rows(columns);
    for (std::size_t i = 0; i < pos.size(); ++i)
        for (SiteId j : pos[i]) col_rows[j].push_back(i);
    std::vector<std::size_t> conflicts(pos.size(), 0);
    std::vector<std::size_t> seen(pos.size(), pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
        for (SiteId j : pos[i])
            for (auto other : col_rows[j])
                if (other != i && seen[other] != i) {
                    seen[other] = i;
                    ++conflicts[i];
                }
    }
    std::vector<std::size_t> order(pos.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return conflicts[a] < conflicts[b]; });
    return order;
}

namespace detail {

/// Greedy dual of the double-cover relaxation: rows in `order` raise their
/// weight until one of their open columns is saturated. Returns the implied
/// number of columns still needed, or infinity when a row has fewer open
/// candidates than its deficit. `load` must hold zeros and is left dirty.
template <class Deficit, class Open>
double cover_dual_ascent(const std::vector<std::vector<SiteId>>& pos, const std::vector<std::size_t>& order,
                         Deficit deficit, Open open, std::vector<double>& load) {
    double total = 0.0;
    for (auto i : order) {
        const std::size_t d = deficit(i);
        if (d == 0) continue;
        std::size_t avail = 0;
        double room = 1.0;
        for (SiteId j : pos[i])
            if (open(j)) {
                ++avail;
                room = std::min(room, 1.0 - load[j]);
            }
        if (avail < d) return std::numeric_limits<double>::infinity();
        if (room <= 0.0) continue;
        for (SiteId j : pos[i])
            if (open(j)) load[j] += room;
        total += static_cast<double>(d) * room;
    }
    return total;
}

/// Swap local search for k columns covering every row twice. Starts from a
/// greedy cover and restarts from random subsets; a fixed seed keeps it
/// deterministic. Returns an empty vector when nothing was found.
inline std::vector<SiteId> cover_heuristic(const std::vector<std::vector<SiteId>>& pos, std::size_t columns,
                                           std::size_t k, std::size_t max_steps = 20000) {
    const std::size_t rows = pos.size();
    std::vector<std::vector<std::size_t>> col_rows(columns);
    for (std::size_t i = 0; i < rows; ++i)
        for (SiteId j : pos[i]) col_rows[j].push_back(i);

    std::vector<std::size_t> hits(rows, 0);
    std::vector<char> in(columns, 0);
    std::vector<SiteId> chosen;
    std::size_t missing = 0;
    auto deficit = [&](std::size_t i) { return hits[i] >= 2 ? std::size_t{0} : 2 - hits[i]; };
    auto toggle = [&](SiteId j, bool on) {
        in[j] = on;
        for (auto i : col_rows[j]) {
            missing -= deficit(i);
            hits[i] += on ? 1 : -1;
            missing += deficit(i);
        }
    };
    auto reset = [&] {
        std::fill(hits.begin(), hits.end(), 0);
        std::fill(in.begin(), in.end(), 0);
        chosen.clear();
        missing = 2 * rows;
    };
    // Change in total deficit from adding (sign 1) or removing (sign -1) j.
    auto gain = [&](SiteId j, int sign) {
        long change = 0;
        for (auto i : col_rows[j]) {
            const long before = static_cast<long>(deficit(i));
            const long h = static_cast<long>(hits[i]) + sign;
            change += (h >= 2 ? 0 : 2 - h) - before;
        }
        return change;
    };

    reset();
    while (chosen.size() < k) {
        SiteId best = columns;
        long best_change = 1;
        for (SiteId j = 0; j < columns; ++j) {
            if (in[j]) continue;
            const auto change = gain(j, 1);
            if (best == columns || change < best_change) {
                best = j;
                best_change = change;
            }
        }
        toggle(best, true);
        chosen.push_back(best);
    }

    Rng rng(kDefaultSeed);
    constexpr std::size_t kRestartEvery = 2000;
    std::vector<std::size_t> open_rows;
    for (std::size_t step = 0; step < max_steps && missing > 0; ++step) {
        if (step > 0 && step % kRestartEvery == 0) {
            reset();
            while (chosen.size() < k) {
                const SiteId j = static_cast<SiteId>(rng.below(columns));
                if (in[j]) continue;
                toggle(j, true);
                chosen.push_back(j);
            }
            continue;
        }
        open_rows.clear();
        for (std::size_t i = 0; i < rows; ++i)
            if (hits[i] < 2) open_rows.push_back(i);
        const auto row = open_rows[rng.below(open_rows.size())];
        // Best swap bringing in a column of the chosen row; ties broken at random.
        long best_change = 0;
        std::size_t ties = 0;
        std::size_t out_slot = k;
        SiteId incoming = columns;
        for (SiteId b : pos[row]) {
            if (in[b]) continue;
            const auto added = gain(b, 1);
            toggle(b, true);
            for (std::size_t s = 0; s < k; ++s) {
                const auto change = added + gain(chosen[s], -1);
                if (incoming == columns || change < best_change) {
                    best_change = change;
                    ties = 1;
                    out_slot = s;
                    incoming = b;
                } else if (change == best_change && rng.below(++ties) == 0) {
                    out_slot = s;
                    incoming = b;
                }
            }
            toggle(b, false);
        }
        if (incoming == columns) continue;
        toggle(chosen[out_slot], false);
        toggle(incoming, true);
        chosen[out_slot] = incoming;
    }
    if (missing > 0) return {};
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

/// Exact search for k columns covering every row twice.
///
/// Branches on the row with the least slack; a greedy dual of the covering
/// relaxation bounds the columns still needed.
class DoubleCoverSearch {
    static constexpr std::size_t kRootSteps = 600;
    static constexpr std::size_t kNodeSteps = 15;

public:
    DoubleCoverSearch(std::size_t columns, std::size_t k, const CandidateMap& candidates)
        : columns_(columns), k_(k), pos_(candidates.sets()), col_rows_(columns), chosen_(columns, 0),
          banned_(columns, 0), hits_(pos_.size(), 0), degree_(columns, 0), load_(columns, 0.0), weights_(pos_.size(), 0.0), trial_(pos_.size(), 0.0),
          order_(packing_order(pos_, columns)) {
        for (std::size_t i = 0; i < pos_.size(); ++i)
            for (SiteId j : pos_[i]) col_rows_[j].push_back(i);
    }

    bool run() { return search(); }

    /// True when the bound at the root already rules out k columns.
    bool root_pruned(bool greedy_only) { return lower_bound(greedy_only) > k_; }

    std::vector<SiteId> chosen() const {
        std::vector<SiteId> out;
        for (std::size_t j = 0; j < columns_; ++j)
            if (chosen_[j]) out.push_back(j);
        return out;
    }

private:
    std::size_t deficit(std::size_t i) const { return hits_[i] >= 2 ? 0 : 2 - hits_[i]; }

    bool open_column(SiteId j) const { return !chosen_[j] && !banned_[j]; }

    std::size_t available(std::size_t i) const {
        std::size_t count = 0;
        for (SiteId j : pos_[i]) count += open_column(j);
        return count;
    }

    /// Columns still needed, or k + 1 when some row cannot be satisfied.
    ///
    /// Any weights z_i >= 0 give the bound
    ///   sum_i deficit_i z_i + sum_{open j} min(0, 1 - sum_{i : j in Pos(i)} z_i).
    /// Weights are first raised greedily (once from zero in packing order,
    /// once from z_i = 1 / max_{j in Pos(i)} degree_j), then improved by
    /// subgradient steps carried over between nodes.
    std::size_t lower_bound(bool greedy_only = false) {
        std::fill(degree_.begin(), degree_.end(), 0);
        for (std::size_t i = 0; i < pos_.size(); ++i) {
            const auto d = deficit(i);
            if (d == 0) continue;
            std::size_t avail = 0;
            for (SiteId j : pos_[i])
                if (open_column(j)) {
                    ++avail;
                    ++degree_[j];
                }
            if (avail < d) return k_ + 1;
        }
        double best = 0.0;
        for (int start = 0; start < 2; ++start) {
            std::fill(load_.begin(), load_.end(), 0.0);
            std::fill(trial_.begin(), trial_.end(), 0.0);
            double total = 0.0;
            if (start == 1) {
                for (std::size_t i = 0; i < pos_.size(); ++i) {
                    const auto d = deficit(i);
                    if (d == 0) continue;
                    std::size_t widest = 1;
                    for (SiteId j : pos_[i])
                        if (open_column(j)) widest = std::max(widest, degree_[j]);
                    trial_[i] = 1.0 / static_cast<double>(widest);
                    for (SiteId j : pos_[i])
                        if (open_column(j)) load_[j] += trial_[i];
                    total += static_cast<double>(d) * trial_[i];
                }
            }
            for (auto i : order_) {
                const auto d = deficit(i);
                if (d == 0) continue;
                double room = 1.0;
                for (SiteId j : pos_[i])
                    if (open_column(j)) room = std::min(room, 1.0 - load_[j]);
                if (room <= 0.0) continue;
                trial_[i] += room;
                for (SiteId j : pos_[i])
                    if (open_column(j)) load_[j] += room;
                total += static_cast<double>(d) * room;
            }
            if (total > best) {
                best = total;
                if (!weights_ready_) weights_ = trial_;
            }
        }
        weights_ready_ = true;
        const std::size_t budget = k_ - count_;
        auto rounded = [](double v) { return static_cast<std::size_t>(std::ceil(v - 1e-9)); };
        if (rounded(best) > budget || greedy_only) return rounded(best);

        // Subgradient ascent on the weights.
        const std::size_t steps = root_done_ ? kNodeSteps : kRootSteps;
        root_done_ = true;
        const double target = static_cast<double>(budget) + 1.0;
        double theta = 1.0;
        std::size_t stall = 0;
        for (std::size_t it = 0; it < steps; ++it) {
            std::fill(load_.begin(), load_.end(), 0.0);
            double value = 0.0;
            for (std::size_t i = 0; i < pos_.size(); ++i) {
                const auto d = deficit(i);
                if (d == 0 || weights_[i] == 0.0) continue;
                value += static_cast<double>(d) * weights_[i];
                for (SiteId j : pos_[i])
                    if (open_column(j)) load_[j] += weights_[i];
            }
            for (std::size_t j = 0; j < columns_; ++j)
                if (open_column(j) && load_[j] > 1.0) value += 1.0 - load_[j];
            if (value > best + 1e-12) {
                best = value;
                stall = 0;
            } else if (++stall >= 10) {
                theta *= 0.5;
                stall = 0;
            }
            if (rounded(best) > budget) break;
            double norm = 0.0;
            for (std::size_t i = 0; i < pos_.size(); ++i) {
                const auto d = deficit(i);
                double g = static_cast<double>(d);
                if (d > 0)
                    for (SiteId j : pos_[i])
                        if (open_column(j) && load_[j] > 1.0) g -= 1.0;
                trial_[i] = g;
                norm += g * g;
            }
            if (norm == 0.0) break;
            const double step = theta * (target - value) / norm;
            for (std::size_t i = 0; i < pos_.size(); ++i)
                if (deficit(i) > 0) weights_[i] = std::max(0.0, weights_[i] + step * trial_[i]);
        }
        return rounded(best);
    }

    void set_chosen(SiteId j, bool on) {
        chosen_[j] = on;
        for (auto i : col_rows_[j]) hits_[i] += on ? 1 : -1;
        count_ += on ? 1 : -1;
    }

    bool search() {
        if (count_ + lower_bound() > k_) return false;
        // Row with the least slack between available columns and deficit.
        std::size_t pick = pos_.size();
        std::size_t best_slack = columns_ + 1;
        for (std::size_t i = 0; i < pos_.size(); ++i) {
            const auto d = deficit(i);
            if (d == 0) continue;
            const auto slack = available(i) - d;
            if (slack < best_slack) {
                best_slack = slack;
                pick = i;
            }
        }
        if (pick == pos_.size()) return true;

        std::vector<SiteId> branch;
        for (SiteId j : pos_[pick])
            if (open_column(j)) branch.push_back(j);
        // Columns that help the most unsatisfied rows first.
        std::vector<std::size_t> score(branch.size(), 0);
        for (std::size_t b = 0; b < branch.size(); ++b)
            for (auto i : col_rows_[branch[b]]) score[b] += deficit(i) > 0;
        std::vector<std::size_t> order(branch.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return score[a] > score[b]; });

        std::vector<SiteId> banned_here;
        bool found = false;
        for (auto b : order) {
            const SiteId j = branch[b];
            set_chosen(j, true);
            if (search()) {
                found = true;
                break;
            }
            set_chosen(j, false);
            banned_[j] = 1;
            banned_here.push_back(j);
            if (available(pick) < deficit(pick)) break;
        }
        for (SiteId j : banned_here) banned_[j] = 0;
        return found;
    }

    std::size_t columns_;
    std::size_t k_;
    const std::vector<std::vector<SiteId>>& pos_;
    std::vector<std::vector<std::size_t>> col_rows_;
    std::vector<char> chosen_;
    std::vector<char> banned_;
    std::vector<std::size_t> hits_;
    std::vector<std::size_t> degree_;
    std::vector<double> load_;
    std::vector<double> weights_;
    std::vector<double> trial_;
    std::vector<std::size_t> order_;
    bool weights_ready_ = false;
    bool root_done_ = false;
    std::size_t count_ = 0;
};

}  // namespace detail

/// Decides whether some k-subset of the columns gives every site at least two
/// of its candidates. Returns a witness, or a site subset that is already
/// infeasible on its own.
inline FeasibilityResult check_feasible(std::size_t n, std::size_t k, const CandidateMap& candidates) {
    if (candidates.columns() != n) throw ParameterError("candidate map does not match n");
    FeasibilityResult result;
    const auto& pos = candidates.sets();
    const auto rows = pos.size();

    if (k < 2 || k > n) {
        result.certificate.resize(rows);
        std::iota(result.certificate.begin(), result.certificate.end(), 0);
        return result;
    }
    for (std::size_t i = 0; i < rows; ++i)
        if (pos[i].size() < 2) result.certificate.push_back(i);
    if (!result.certificate.empty()) return result;

    // Cheap checks first: most maps are far from the threshold either way.
    detail::DoubleCoverSearch search(n, k, candidates);
    std::vector<SiteId> witness;
    if (!search.root_pruned(true)) {
        witness = detail::cover_heuristic(pos, n, k, 500);
        if (witness.empty() && !search.root_pruned(false)) witness = detail::cover_heuristic(pos, n, k);
    }
    if (!witness.empty() || search.run()) {
        result.feasible = true;
        result.witness = witness.empty() ? search.chosen() : std::move(witness);
        for (SiteId j = 0; result.witness.size() < k; ++j)
            if (!std::binary_search(result.witness.begin(), result.witness.end(), j))
                result.witness.insert(std::lower_bound(result.witness.begin(), result.witness.end(), j), j);
        return result;
    }

    // Rows with pairwise disjoint candidate sets need two columns each.
    const auto order = packing_order(pos, n);
    std::vector<char> used(n, 0);
    std::vector<SiteId> packing;
    for (auto i : order) {
        if (std::any_of(pos[i].begin(), pos[i].end(), [&](SiteId j) { return used[j]; })) continue;
        packing.push_back(i);
        for (SiteId j : pos[i]) used[j] = 1;
    }
    if (2 * packing.size() > k) {
        std::sort(packing.begin(), packing.end());
        result.certificate = std::move(packing);
    } else {
        result.certificate.resize(rows);
        std::iota(result.certificate.begin(), result.certificate.end(), 0);
    }
    return result;
}

}  // namespace duocover
