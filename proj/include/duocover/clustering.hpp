#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "candidates.hpp"
#include "core.hpp"
#include "rng.hpp"

namespace duocover {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Overlapping clustering: every site sits in the cluster of its closest
/// mean (P) and of its second-closest mean (S).
struct ClusterState {
    std::vector<Point> means;  // the means the accepted assignment was computed against
    std::vector<std::vector<SiteId>> primary;    // P_i, sorted
    std::vector<std::vector<SiteId>> secondary;  // S_i, sorted
    double cost = 0.0;

    std::vector<double> accepted_costs;  // one entry per accepted iteration
    std::size_t iterations = 0;          // loop passes, including the final rejected one

    std::size_t k() const { return means.size(); }

    friend bool operator==(const ClusterState&, const ClusterState&) = default;
};

namespace detail {

/// k distinct indices from [0, n), partial Fisher-Yates.
inline std::vector<SiteId> sample_distinct(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<SiteId> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
    pool.resize(k);
    return pool;
}

inline double distance(const ExchangeSite& s, const Point& m) { return duocover::distance(s.x, s.y, m.x, m.y); }

inline void check_cluster_count(std::size_t n, std::size_t k) {
    if (k < 2) throw ParameterError("overlapping clustering needs k >= 2");
    if (k > n) throw ParameterError("k must not exceed the number of sites");
}

}  // namespace detail

/// Overlapping weighted k-means. Stops at the first pass whose cost does not
/// strictly improve and returns the last accepted assignment.
inline ClusterState compute_overlapping_clusters(const Instance& instance, std::size_t k, Rng& rng) {
    const auto& sites = instance.sites();
    const std::size_t n = sites.size();
    detail::check_cluster_count(n, k);

    std::vector<Point> means(k);
    {
        const auto seeds = detail::sample_distinct(n, k, rng);
        for (std::size_t i = 0; i < k; ++i) means[i] = {sites[seeds[i]].x, sites[seeds[i]].y};
    }

    ClusterState best;
    double cost = std::numeric_limits<double>::infinity();
    std::vector<std::vector<SiteId>> P(k), S(k);
    std::size_t iterations = 0;
    while (true) {
        ++iterations;
        for (auto& c : P) c.clear();
        for (auto& c : S) c.clear();
        for (SiteId j = 0; j < n; ++j) {
            double d1 = std::numeric_limits<double>::infinity();
            double d2 = d1;
            std::size_t c1 = 0;
            std::size_t c2 = 0;
            for (std::size_t i = 0; i < k; ++i) {
                const double d = detail::distance(sites[j], means[i]);
                if (d < d1) {
                    d2 = d1;
                    c2 = c1;
                    d1 = d;
                    c1 = i;
                } else if (d < d2) {
                    d2 = d;
                    c2 = i;
                }
            }
            P[c1].push_back(j);
            S[c2].push_back(j);
        }

        double new_cost = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            for (SiteId j : P[i]) new_cost += sites[j].weight() * detail::distance(sites[j], means[i]);
            for (SiteId j : S[i]) new_cost += sites[j].weight() * detail::distance(sites[j], means[i]);
        }

        if (!(cost > new_cost)) break;
        cost = new_cost;
        best.means = means;
        best.primary = P;
        best.secondary = S;
        best.cost = new_cost;
        best.accepted_costs.push_back(new_cost);

        for (std::size_t i = 0; i < k; ++i) {
            double wx = 0.0, wy = 0.0, w = 0.0;
            for (const auto* members : {&P[i], &S[i]}) {
                for (SiteId j : *members) {
                    const double weight = sites[j].weight();
                    wx += weight * sites[j].x;
                    wy += weight * sites[j].y;
                    w += weight;
                }
            }
            if (w > 0.0) means[i] = {wx / w, wy / w};
        }
    }
    best.iterations = iterations;
    return best;
}

/// Per-cluster medoid picked the way the sampler does; nullopt for a cluster
/// with no members. Clusters are visited in index order and a site already
/// taken by an earlier cluster is skipped while the pool has another member,
/// so coincident means still give every site two distinct candidates.
inline std::vector<std::optional<SiteId>> cluster_medoids(const Instance& instance, const ClusterState& state) {
    const auto& sites = instance.sites();
    std::vector<std::optional<SiteId>> medoids(state.k());
    std::vector<char> taken(sites.size(), 0);
    for (std::size_t i = 0; i < state.k(); ++i) {
        const auto& P = state.primary[i];
        const auto& S = state.secondary[i];
        // Candidates come from P_i when it is non-empty, scored over P_i and S_i;
        // otherwise from S_i, scored over S_i alone.
        const bool from_primary = !P.empty();
        const auto& pool = from_primary ? P : S;
        double best = std::numeric_limits<double>::infinity();
        double best_free = best;
        std::optional<SiteId> free_pick;
        for (SiteId s : pool) {
            double score = 0.0;
            if (from_primary)
                for (SiteId x : P) score += sites[x].weight() * distance(sites[s], sites[x]);
            for (SiteId x : S) score += sites[x].weight() * distance(sites[s], sites[x]);
            if (score < best) {
                best = score;
                medoids[i] = s;
            }
            if (!taken[s] && score < best_free) {
                best_free = score;
                free_pick = s;
            }
        }
        if (free_pick) medoids[i] = free_pick;
        if (medoids[i]) taken[*medoids[i]] = 1;
    }
    return medoids;
}

/// Candidate pairs (site, medoid) produced by one clustering run.
inline void add_run_candidates(const Instance& instance, const ClusterState& state,
                               std::vector<std::vector<SiteId>>& pos) {
    const auto medoids = cluster_medoids(instance, state);
    for (std::size_t i = 0; i < state.k(); ++i) {
        if (!medoids[i]) continue;
        for (SiteId x : state.primary[i]) pos[x].push_back(*medoids[i]);
        for (SiteId x : state.secondary[i]) pos[x].push_back(*medoids[i]);
    }
}

struct SamplingOptions {
    std::size_t threads = 1;
};

/// Cluster-based sampling: the union of the medoid candidates of `nbruns`
/// clustering runs. Run r draws from Rng::stream(seed, r).
inline CandidateMap sampling_points(const Instance& instance, std::size_t nbruns, std::size_t k, std::uint64_t seed,
                                    SamplingOptions options = {}) {
    const std::size_t n = instance.size();
    if (nbruns == 0) throw ParameterError("nbruns must be at least 1");
    detail::check_cluster_count(n, k);

    std::vector<std::vector<std::vector<SiteId>>> per_run(nbruns);
    auto run_one = [&](std::size_t run) {
        Rng rng = Rng::stream(seed, run);
        const auto state = compute_overlapping_clusters(instance, k, rng);
        per_run[run].assign(n, {});
        add_run_candidates(instance, state, per_run[run]);
    };

    const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, nbruns);
    if (workers == 1) {
        for (std::size_t r = 0; r < nbruns; ++r) run_one(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < nbruns; r = next++) run_one(r);
            });
    }

    std::vector<std::vector<SiteId>> pos(n);
    for (const auto& run : per_run)
        for (std::size_t i = 0; i < n; ++i) pos[i].insert(pos[i].end(), run[i].begin(), run[i].end());
    return CandidateMap(n, std::move(pos), CandidateSource::CBS);
}

/// The `neighbors` cheapest columns of every row, ties to the lower id.
inline CandidateMap kcn_candidates(const CostMatrix& costs, std::size_t neighbors) {
    const std::size_t cols = costs.cols();
    if (neighbors == 0 || neighbors > cols) throw ParameterError("neighbors must lie in [1, n]");
    std::vector<std::vector<SiteId>> pos(costs.rows());
    std::vector<SiteId> order(cols);
    for (std::size_t i = 0; i < costs.rows(); ++i) {
        for (std::size_t j = 0; j < cols; ++j) order[j] = j;
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(neighbors), order.end(),
                          [&](SiteId a, SiteId b) {
                              const double ca = costs(i, a);
                              const double cb = costs(i, b);
                              return ca < cb || (ca == cb && a < b);
                          });
        pos[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(neighbors));
    }
    return CandidateMap(cols, std::move(pos), neighbors == cols ? CandidateSource::FULL : CandidateSource::KCN);
}

inline CandidateMap kcn_candidates(const Instance& instance, std::size_t neighbors) {
    return kcn_candidates(CostMatrix(instance), neighbors);
}

/// Distinct medoids of one clustering run, padded to k with the lowest unused
/// ids. Used as a solver warm start.
inline std::vector<SiteId> medoid_open_set(const Instance& instance, std::size_t k, Rng& rng) {
    const auto state = compute_overlapping_clusters(instance, k, rng);
    std::vector<SiteId> open;
    for (const auto& m : cluster_medoids(instance, state))
        if (m) open.push_back(*m);
    std::sort(open.begin(), open.end());
    open.erase(std::unique(open.begin(), open.end()), open.end());
    for (SiteId j = 0; open.size() < k && j < instance.size(); ++j)
        if (!std::binary_search(open.begin(), open.end(), j)) {
            open.insert(std::lower_bound(open.begin(), open.end(), j), j);
        }
    return open;
}

}  // namespace duocover
