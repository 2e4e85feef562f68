#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "candidates.hpp"
#include "clustering.hpp"
#include "core.hpp"
#include "feasibility.hpp"
#include "rng.hpp"

namespace duocover {

enum class SolveStatus { Optimal, Infeasible, TimedOut };

inline const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::TimedOut: return "timed_out";
    }
    return "?";
}

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    std::optional<Allocation> allocation;
    double bound = std::numeric_limits<double>::infinity();  // best lower bound at termination
    std::size_t nodes_explored = 0;
    double wall_time = 0.0;  // seconds
};

struct SolveOptions {
    std::optional<double> time_limit;  // seconds
    std::size_t threads = 1;
    std::vector<std::vector<SiteId>> warm_starts;
    bool cbs_warm_start = true;  // geometric instances only
    std::uint64_t seed = kDefaultSeed;
    std::size_t subgradient_iterations = 800;
};

/// Like evaluate(), but each row may only use its candidate columns.
/// Returns nullopt when some row has fewer than two candidates open.
inline std::optional<Allocation> evaluate_restricted(const CostMatrix& costs, const CandidateMap* candidates,
                                                     std::span<const SiteId> open) {
    if (!candidates) return evaluate(costs, open);
    Allocation result;
    result.open = detail::normalized_open(open, costs.cols());
    if (result.open.size() < 2) return std::nullopt;
    const auto n = costs.rows();
    result.primary.resize(n);
    result.secondary.resize(n);
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double best = inf, second = inf;
        SiteId best_id = 0, second_id = 0;
        std::size_t found = 0;
        for (SiteId j : result.open) {
            if (!candidates->allows(i, j)) continue;
            ++found;
            const double c = costs(i, j);
            if (c < best) {
                second = best;
                second_id = best_id;
                best = c;
                best_id = j;
            } else if (c < second) {
                second = c;
                second_id = j;
            }
        }
        if (found < 2) return std::nullopt;
        result.primary[i] = best_id;
        result.secondary[i] = second_id;
        result.total_cost += best + second;
    }
    return result;
}

namespace detail {

/// Best-first branch-and-bound over which columns are open.
///
/// Nodes fix a prefix of the column order: columns before `depth` are open
/// when listed in `open` and closed otherwise. Two bounds are combined:
///  - the sum over rows of the two cheapest still-available columns;
///  - a Lagrangian bound with the "two parents per row" rows dualized, whose
///    multipliers are tuned once at the root by subgradient ascent. Columns are
///    ordered by their Lagrangian reduced cost, so the bound of a node is the
///    reduced cost of its open columns plus that of the next free ones.
/// On restricted maps each node also re-tunes the multipliers briefly and
/// checks that the free columns can still double-cover every row.
class DcpSearch {
public:
    DcpSearch(const CostMatrix& costs, std::size_t k, const CandidateMap* candidates, const SolveOptions& options)
        : costs_(costs), rows_(costs.rows()), cols_(costs.cols()), k_(k),
          candidates_(candidates && !candidates->is_full() ? candidates : nullptr), options_(options),
          start_(Clock::now()) {
        if (options_.time_limit) deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(
                                                           std::chrono::duration<double>(*options_.time_limit));
    }

    SolveResult run() {
        SolveResult result;
        if (k_ < 2) return finish(result, SolveStatus::Infeasible);
        if (k_ > cols_) throw ParameterError("k must not exceed the number of candidate positions");

        if (candidates_) {
            const auto feasibility = check_feasible(cols_, k_, *candidates_);
            if (!feasibility.feasible) return finish(result, SolveStatus::Infeasible);
            packing_order_ = packing_order(candidates_->sets(), cols_);
            build_lists();
            offer(feasibility.witness);
        } else {
            build_lists();
            offer(column_sum_start());
        }
        for (const auto& start : options_.warm_starts)
            if (start.size() == k_) offer(start);

        optimize_multipliers();
        fix_columns();
        search();

        const bool timed_out = timed_out_.load();
        if (!timed_out) global_bound_ = best_cost_.load();
        result.bound = std::min(global_bound_, best_cost_.load());
        if (best_open_.empty()) return finish(result, timed_out ? SolveStatus::TimedOut : SolveStatus::Infeasible);
        std::vector<SiteId> open(best_open_.begin(), best_open_.end());
        result.allocation = evaluate_restricted(costs_, candidates_, open);
        if (!timed_out) result.bound = result.allocation->total_cost;
        return finish(result, timed_out ? SolveStatus::TimedOut : SolveStatus::Optimal);
    }

private:
    using Clock = std::chrono::steady_clock;
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    static constexpr std::int32_t kClosed = -1;
    static constexpr std::int32_t kForced = -2;
    static constexpr std::size_t kNodeIterations = 60;

    struct Entry {
        double cost;
        std::uint32_t index;
    };

    struct Node {
        double bound = 0.0;
        double reduced_open = 0.0;  // Lagrangian reduced cost of `open`
        std::uint32_t depth = 0;
        bool refined = false;
        std::vector<std::uint32_t> open;
    };

    struct NodeOrder {
        bool operator()(const Node& a, const Node& b) const {
            if (a.bound != b.bound) return a.bound > b.bound;
            return a.depth < b.depth;
        }
    };

    using NodeQueue = std::priority_queue<Node, std::vector<Node>, NodeOrder>;

    /// Per-thread workspace.
    struct Scratch {
        std::vector<char> in_open;
        std::vector<double> load;
        std::vector<double> u, g, rho;
        std::vector<std::uint32_t> free, pick;
    };

    SolveResult finish(SolveResult& result, SolveStatus status) {
        result.status = status;
        result.nodes_explored = nodes_.load();
        result.wall_time = std::chrono::duration<double>(Clock::now() - start_).count();
        if (status == SolveStatus::Infeasible) {
            result.allocation.reset();
            result.bound = kInf;
        }
        return result;
    }

    bool allowed(std::size_t i, std::size_t j) const { return !candidates_ || candidates_->allows(i, j); }

    void build_lists() {
        row_lists_.assign(rows_, {});
        col_lists_.assign(cols_, {});
        for (std::size_t i = 0; i < rows_; ++i) {
            auto& row = row_lists_[i];
            if (candidates_) {
                for (SiteId j : (*candidates_)[i]) row.push_back({costs_(i, j), static_cast<std::uint32_t>(j)});
            } else {
                row.reserve(cols_);
                for (std::size_t j = 0; j < cols_; ++j) row.push_back({costs_(i, j), static_cast<std::uint32_t>(j)});
            }
            std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) {
                return a.cost < b.cost || (a.cost == b.cost && a.index < b.index);
            });
            for (const auto& e : row) col_lists_[e.index].push_back({e.cost, static_cast<std::uint32_t>(i)});
        }
    }

    Scratch make_scratch() const {
        Scratch s;
        s.in_open.assign(cols_, 0);
        s.load.assign(cols_, 0.0);
        s.u.assign(rows_, 0.0);
        s.g.assign(rows_, 0.0);
        s.rho.assign(cols_, 0.0);
        return s;
    }

    /// Objective of an open set, kInf when some row lacks two candidates.
    double set_cost(std::span<const std::uint32_t> open, Scratch& scratch) const {
        for (auto j : open) scratch.in_open[j] = 1;
        double total = 0.0;
        for (std::size_t i = 0; i < rows_ && total < kInf; ++i) {
            int found = 0;
            double row_cost = 0.0;
            for (const auto& e : row_lists_[i]) {
                if (!scratch.in_open[e.index]) continue;
                row_cost += e.cost;
                if (++found == 2) break;
            }
            total = found == 2 ? total + row_cost : kInf;
        }
        for (auto j : open) scratch.in_open[j] = 0;
        return total;
    }

    double tolerance() const {
        const double ub = best_cost_.load(std::memory_order_relaxed);
        return 1e-10 * std::max(1.0, std::abs(ub));
    }

    bool prunable(double bound) const {
        const double ub = best_cost_.load(std::memory_order_relaxed);
        return bound >= ub - tolerance();
    }

    void offer(std::span<const std::uint32_t> open, Scratch& scratch) {
        const double value = set_cost(open, scratch);
        if (!(value < kInf)) return;
        std::vector<std::uint32_t> sorted(open.begin(), open.end());
        std::sort(sorted.begin(), sorted.end());
        std::lock_guard lock(incumbent_mutex_);
        const double ub = best_cost_.load();
        if (value < ub || (value == ub && sorted < best_open_)) {
            best_open_ = std::move(sorted);
            best_cost_.store(value);
        }
    }

    void offer(std::span<const SiteId> open) {
        std::vector<std::uint32_t> columns;
        for (SiteId j : open)
            if (j < cols_) columns.push_back(static_cast<std::uint32_t>(j));
        std::sort(columns.begin(), columns.end());
        columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
        if (columns.size() != k_) return;
        auto scratch = make_scratch();
        offer(columns, scratch);
    }

    /// k columns with the smallest total allocation cost.
    std::vector<SiteId> column_sum_start() const {
        std::vector<double> sums(cols_, 0.0);
        for (std::size_t j = 0; j < cols_; ++j)
            for (const auto& e : col_lists_[j]) sums[j] += e.cost;
        std::vector<SiteId> order(cols_);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sums[a] < sums[b]; });
        order.resize(k_);
        return order;
    }

    void reduced_costs(const std::vector<double>& u, std::vector<double>& rho) const {
        rho.assign(cols_, 0.0);
        for (std::size_t j = 0; j < cols_; ++j) {
            double r = 0.0;
            for (const auto& e : col_lists_[j]) r += std::min(0.0, e.cost - u[e.index]);
            rho[j] = r;
        }
    }

    /// Subgradient ascent on the Lagrangian dual; also feeds the incumbent with
    /// the columns the relaxation picks.
    void optimize_multipliers() {
        u_.assign(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) u_[i] = row_lists_[i][1].cost;
        std::vector<double> u = u_, rho, g(rows_);
        std::vector<std::uint32_t> order(cols_);
        auto scratch = make_scratch();
        double best = -kInf;
        double lambda = 2.0;
        std::size_t stall = 0;
        for (std::size_t it = 0; it < options_.subgradient_iterations; ++it) {
            if (out_of_time()) break;
            reduced_costs(u, rho);
            std::iota(order.begin(), order.end(), 0);
            std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_ - 1), order.end(),
                             [&](auto a, auto b) { return rho[a] < rho[b] || (rho[a] == rho[b] && a < b); });
            double value = 2.0 * std::accumulate(u.begin(), u.end(), 0.0);
            for (std::size_t p = 0; p < k_; ++p) value += rho[order[p]];
            if (it == 0 || value > best + 1e-12 * std::max(1.0, std::abs(best))) {
                best = value;
                u_ = u;
                stall = 0;
            } else if (++stall >= 20) {
                lambda /= 2.0;
                stall = 0;
            }
            if (it % 5 == 0) offer(std::span<const std::uint32_t>(order.data(), k_), scratch);

            std::fill(g.begin(), g.end(), 2.0);
            for (std::size_t p = 0; p < k_; ++p)
                for (const auto& e : col_lists_[order[p]])
                    if (e.cost < u[e.index]) g[e.index] -= 1.0;
            double norm = 0.0;
            for (double gi : g) norm += gi * gi;
            const double ub = best_cost_.load();
            const double gap = ub - value;
            if (norm == 0.0 || gap <= tolerance() || lambda < 1e-6) break;
            const double step = lambda * gap / norm;
            for (std::size_t i = 0; i < rows_; ++i) u[i] += step * g[i];
        }
        reduced_costs(u_, rho_);
        base_ = 2.0 * std::accumulate(u_.begin(), u_.end(), 0.0);
    }

    /// Closes or opens columns whose opposite choice cannot beat the incumbent.
    void fix_columns() {
        std::vector<std::uint32_t> sorted(cols_);
        std::iota(sorted.begin(), sorted.end(), 0);
        std::stable_sort(sorted.begin(), sorted.end(), [&](auto a, auto b) { return rho_[a] < rho_[b]; });
        rank_.assign(cols_, 0);
        double root = base_;
        for (std::size_t p = 0; p < k_; ++p) root += rho_[sorted[p]];
        root_bound_ = root;
        std::vector<std::uint32_t> forced;
        ord_.clear();
        for (std::size_t p = 0; p < cols_; ++p) {
            const auto j = sorted[p];
            if (k_ < cols_ && p < k_ && prunable(root - rho_[j] + rho_[sorted[k_]])) {
                forced.push_back(j);
                rank_[j] = kForced;
            } else if (p >= k_ && prunable(root - rho_[sorted[k_ - 1]] + rho_[j])) {
                rank_[j] = kClosed;
            } else {
                rank_[j] = static_cast<std::int32_t>(ord_.size());
                ord_.push_back(j);
            }
        }
        prefix_.assign(ord_.size() + 1, 0.0);
        for (std::size_t p = 0; p < ord_.size(); ++p) prefix_[p + 1] = prefix_[p] + rho_[ord_[p]];
        root_.open = std::move(forced);
        root_.depth = 0;
        root_.reduced_open = 0.0;
        for (auto j : root_.open) root_.reduced_open += rho_[j];
        root_.bound = lagrangian_bound(root_);
    }

    double lagrangian_bound(const Node& node) const {
        const std::size_t r = k_ - node.open.size();
        if (node.depth + r > ord_.size()) return kInf;
        return base_ + node.reduced_open + (prefix_[node.depth + r] - prefix_[node.depth]);
    }

    bool available(std::uint32_t j, const Node& node, const Scratch& scratch) const {
        return scratch.in_open[j] || rank_[j] >= static_cast<std::int32_t>(node.depth);
    }

    /// Two-cheapest-available bound. On restricted maps the node is also
    /// dropped when the free columns cannot double-cover every row in budget.
    double combinatorial_bound(const Node& node, Scratch& scratch) const {
        for (auto j : node.open) scratch.in_open[j] = 1;
        double total = 0.0;
        for (std::size_t i = 0; i < rows_ && total < kInf; ++i) {
            int found = 0;
            double row_cost = 0.0;
            for (const auto& e : row_lists_[i]) {
                if (!available(e.index, node, scratch)) continue;
                row_cost += e.cost;
                if (++found == 2) break;
            }
            total = found == 2 ? total + row_cost : kInf;
        }
        if (candidates_ && total < kInf) {
            const std::size_t r = k_ - node.open.size();
            const auto depth = static_cast<std::int32_t>(node.depth);
            auto deficit = [&](std::size_t i) {
                std::size_t hits = 0;
                for (const auto& e : row_lists_[i])
                    if (scratch.in_open[e.index] && ++hits == 2) break;
                return 2 - hits;
            };
            auto open = [&](SiteId j) { return !scratch.in_open[j] && rank_[j] >= depth; };
            std::fill(scratch.load.begin(), scratch.load.end(), 0.0);
            const double needed = cover_dual_ascent(candidates_->sets(), packing_order_, deficit, open, scratch.load);
            if (needed > static_cast<double>(r) + 1e-9) total = kInf;
        }
        for (auto j : node.open) scratch.in_open[j] = 0;
        return total;
    }

    /// Lagrangian bound of a node with the multipliers re-tuned for it,
    /// starting from the root multipliers. Used on restricted maps, where
    /// closing columns leaves some rows with few candidates.
    double node_lagrangian_bound(const Node& node, Scratch& scratch) {
        const std::size_t r = k_ - node.open.size();
        const auto depth = static_cast<std::int32_t>(node.depth);
        auto& u = scratch.u;
        auto& g = scratch.g;
        auto& rho = scratch.rho;
        auto& free = scratch.free;
        u = u_;
        free.clear();
        for (std::size_t j = 0; j < cols_; ++j)
            if (rank_[j] >= depth && std::find(node.open.begin(), node.open.end(), j) == node.open.end())
                free.push_back(static_cast<std::uint32_t>(j));
        if (free.size() < r) return kInf;
        auto column_rho = [&](std::uint32_t j) {
            double value = 0.0;
            for (const auto& e : col_lists_[j]) value += std::min(0.0, e.cost - u[e.index]);
            return value;
        };
        double best = -kInf;
        double lambda = 1.0;
        std::size_t stall = 0;
        for (std::size_t it = 0; it < kNodeIterations; ++it) {
            for (auto j : free) rho[j] = column_rho(j);
            std::nth_element(free.begin(), free.begin() + static_cast<std::ptrdiff_t>(r), free.end(),
                             [&](auto a, auto b) { return rho[a] < rho[b] || (rho[a] == rho[b] && a < b); });
            double value = 2.0 * std::accumulate(u.begin(), u.end(), 0.0);
            for (auto j : node.open) value += column_rho(j);
            for (std::size_t p = 0; p < r; ++p) value += rho[free[p]];
            if (value > best) {
                best = value;
                stall = 0;
                auto& pick = scratch.pick;
                pick.assign(node.open.begin(), node.open.end());
                pick.insert(pick.end(), free.begin(), free.begin() + static_cast<std::ptrdiff_t>(r));
                offer(pick, scratch);
            } else if (++stall >= 4) {
                lambda /= 2.0;
                stall = 0;
            }
            const double ub = best_cost_.load(std::memory_order_relaxed);
            if (prunable(best) || !(ub < kInf)) break;
            // Aim well above the incumbent; steps sized by the remaining gap alone
            // shrink to nothing once a good incumbent is known.
            const double gap = std::max(ub - value, 0.3 * std::abs(ub));

            std::fill(g.begin(), g.end(), 2.0);
            auto take = [&](std::uint32_t j) {
                for (const auto& e : col_lists_[j])
                    if (e.cost < u[e.index]) g[e.index] -= 1.0;
            };
            for (auto j : node.open) take(j);
            for (std::size_t p = 0; p < r; ++p) take(free[p]);
            double norm = 0.0;
            for (double gi : g) norm += gi * gi;
            if (norm == 0.0) break;
            const double step = lambda * gap / norm;
            for (std::size_t i = 0; i < rows_; ++i) u[i] += step * g[i];
        }
        return best;
    }

    bool out_of_time() {
        if (!deadline_) return false;
        if (timed_out_.load(std::memory_order_relaxed)) return true;
        if (Clock::now() >= *deadline_) timed_out_.store(true);
        return timed_out_.load(std::memory_order_relaxed);
    }

    /// Follows include-children down to a leaf, queueing every exclude-child.
    void dive(Node node, NodeQueue& queue, Scratch& scratch) {
        while (true) {
            nodes_.fetch_add(1, std::memory_order_relaxed);
            const std::size_t r = k_ - node.open.size();
            if (r == 0) {
                offer(node.open, scratch);
                return;
            }
            if (prunable(node.bound)) return;
            const std::size_t free = ord_.size() - node.depth;
            if (free == r) {
                auto open = node.open;
                open.insert(open.end(), ord_.begin() + node.depth, ord_.end());
                offer(open, scratch);
                return;
            }
            const auto column = ord_[node.depth];
            Node excluded;
            excluded.depth = node.depth + 1;
            excluded.open = node.open;
            excluded.reduced_open = node.reduced_open;
            excluded.bound = std::max(node.bound, lagrangian_bound(excluded));
            if (!prunable(excluded.bound)) queue.push(std::move(excluded));

            node.open.push_back(column);
            node.reduced_open += rho_[column];
            ++node.depth;
        }
    }

    void search() {
        const std::size_t workers = std::max<std::size_t>(1, options_.threads);
        global_bound_ = kInf;
        if (prunable(root_.bound)) return;
        pool_.push(root_);
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::jthread> threads;
            for (std::size_t w = 0; w < workers; ++w) threads.emplace_back([this, w] { work(w); });
        }
    }

    /// Worker loop. The shared pool feeds idle workers; busy workers donate
    /// part of their queue whenever someone is waiting.
    void work(std::size_t) {
        const std::size_t workers = std::max<std::size_t>(1, options_.threads);
        NodeQueue local;
        auto scratch = make_scratch();
        std::size_t processed = 0;
        while (true) {
            if (local.empty()) {
                std::unique_lock lock(pool_mutex_);
                ++idle_;
                pool_cv_.notify_all();
                pool_cv_.wait(lock, [&] { return !pool_.empty() || idle_ == workers || stop_; });
                if (pool_.empty() || stop_) {
                    pool_cv_.notify_all();
                    return;
                }
                --idle_;
                local.push(pool_.top());
                pool_.pop();
                continue;
            }
            if (out_of_time()) {
                std::lock_guard lock(pool_mutex_);
                stop_ = true;
                if (!local.empty()) global_bound_ = std::min(global_bound_, local.top().bound);
                if (!pool_.empty()) global_bound_ = std::min(global_bound_, pool_.top().bound);
                pool_cv_.notify_all();
                return;
            }
            if (workers > 1 && ++processed % 32 == 0 && local.size() > 1) share(local);

            Node node = local.top();
            local.pop();
            if (prunable(node.bound)) {
                // Everything left is at least as bad.
                local = NodeQueue();
                continue;
            }
            if (!node.refined) {
                node.refined = true;
                double refined = std::max(node.bound, combinatorial_bound(node, scratch));
                if (candidates_ && !prunable(refined))
                    refined = std::max(refined, node_lagrangian_bound(node, scratch));
                if (prunable(refined)) continue;
                if (refined > node.bound && !local.empty() && refined > local.top().bound) {
                    node.bound = refined;
                    local.push(std::move(node));
                    continue;
                }
                node.bound = refined;
            }
            dive(std::move(node), local, scratch);
        }
    }

    void share(NodeQueue& local) {
        std::lock_guard lock(pool_mutex_);
        if (idle_ == 0 || !pool_.empty()) return;
        // Give away every second node so both sides keep good and bad ones.
        NodeQueue keep;
        bool give = false;
        while (!local.empty()) {
            if (give) pool_.push(local.top());
            else keep.push(local.top());
            local.pop();
            give = !give;
        }
        local = std::move(keep);
        pool_cv_.notify_all();
    }

    const CostMatrix& costs_;
    std::size_t rows_;
    std::size_t cols_;
    std::size_t k_;
    const CandidateMap* candidates_;
    SolveOptions options_;
    Clock::time_point start_;
    std::optional<Clock::time_point> deadline_;
    std::atomic<bool> timed_out_{false};
    std::atomic<std::size_t> nodes_{0};

    std::vector<std::vector<Entry>> row_lists_;  // per row, allowed columns by (cost, id)
    std::vector<std::vector<Entry>> col_lists_;  // per column, rows that may use it
    std::vector<std::size_t> packing_order_;

    std::mutex incumbent_mutex_;
    std::atomic<double> best_cost_{kInf};
    std::vector<std::uint32_t> best_open_;

    std::vector<double> u_;
    std::vector<double> rho_;
    double base_ = 0.0;
    double root_bound_ = 0.0;
    std::vector<std::int32_t> rank_;
    std::vector<std::uint32_t> ord_;
    std::vector<double> prefix_;
    Node root_;

    std::mutex pool_mutex_;
    std::condition_variable pool_cv_;
    NodeQueue pool_;
    std::size_t idle_ = 0;
    bool stop_ = false;
    double global_bound_ = kInf;
};

inline SolveOptions with_cbs_warm_start(const Instance& instance, SolveOptions options) {
    if (options.cbs_warm_start && instance.k() >= 2 && instance.k() <= instance.size()) {
        Rng rng(options.seed);
        options.warm_starts.push_back(medoid_open_set(instance, instance.k(), rng));
    }
    return options;
}

}  // namespace detail

/// Exact minimum-cost double cover of the rows by k open columns.
inline SolveResult solve_exact(const CostMatrix& costs, std::size_t k, const SolveOptions& options = {}) {
    return detail::DcpSearch(costs, k, nullptr, options).run();
}

inline SolveResult solve_exact(const Instance& instance, const SolveOptions& options = {}) {
    const CostMatrix costs(instance);
    return solve_exact(costs, instance.k(), detail::with_cbs_warm_start(instance, options));
}

/// Same objective with each row limited to its candidate columns.
inline SolveResult solve_restricted(const CostMatrix& costs, std::size_t k, const CandidateMap& candidates,
                                    const SolveOptions& options = {}) {
    if (candidates.rows() != costs.rows() || candidates.columns() != costs.cols())
        throw ParameterError("candidate map does not match the cost matrix");
    return detail::DcpSearch(costs, k, &candidates, options).run();
}

inline SolveResult solve_restricted(const Instance& instance, const CandidateMap& candidates,
                                    const SolveOptions& options = {}) {
    const CostMatrix costs(instance);
    return solve_restricted(costs, instance.k(), candidates, detail::with_cbs_warm_start(instance, options));
}

/// JSON document with status, total_cost, open, primary, secondary, bound,
/// nodes_explored and wall_time.
inline nlohmann::ordered_json to_json(const SolveResult& result, bool include_timing = true) {
    nlohmann::ordered_json doc;
    doc["status"] = to_string(result.status);
    if (result.allocation) {
        doc["total_cost"] = result.allocation->total_cost;
        doc["open"] = result.allocation->open;
        doc["primary"] = result.allocation->primary;
        doc["secondary"] = result.allocation->secondary;
    } else {
        doc["total_cost"] = nullptr;
        doc["open"] = nlohmann::ordered_json::array();
        doc["primary"] = nlohmann::ordered_json::array();
        doc["secondary"] = nlohmann::ordered_json::array();
    }
    if (std::isfinite(result.bound)) doc["bound"] = result.bound;
    else doc["bound"] = nullptr;
    doc["nodes_explored"] = result.nodes_explored;
    doc["wall_time"] = include_timing ? result.wall_time : 0.0;
    return doc;
}

}  // namespace duocover
