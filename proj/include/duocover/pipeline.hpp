#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "candidates.hpp"
#include "clustering.hpp"
#include "core.hpp"
#include "io.hpp"
#include "milp.hpp"
#include "rng.hpp"
#include "solver.hpp"

namespace duocover {

enum class SpatialProfile { Uniform, ClusteredTowns };

/// Side lengths of the synthetic service area, km.
inline constexpr double kAreaWidth = 300.0;
inline constexpr double kAreaHeight = 450.0;

namespace detail {

/// Pareto-distributed customer count, clamped to [20, 200000].
inline double draw_load(Rng& rng) {
    const double u = 1.0 - rng.uniform();  // (0, 1]
    const double load = std::round(150.0 / std::pow(u, 1.0 / 1.3));
    return std::clamp(load, 20.0, 200000.0);
}

}  // namespace detail

/// Synthetic master instance.
///
/// Uniform scatters sites over the area. ClusteredTowns places roughly one
/// town per 20 sites, gives towns Pareto sizes and draws each site from a
/// Gaussian around its town. Loads are heavy tailed and alpha follows
/// default_alpha().
inline Instance generate_master(std::size_t n, SpatialProfile profile, Rng& rng, std::size_t k = 2) {
    if (n < 2) throw ParameterError("master instance needs at least two sites");
    std::vector<ExchangeSite> sites(n);
    if (profile == SpatialProfile::Uniform) {
        for (std::size_t i = 0; i < n; ++i) {
            sites[i].id = i;
            sites[i].x = rng.uniform(0.0, kAreaWidth);
            sites[i].y = rng.uniform(0.0, kAreaHeight);
        }
    } else {
        struct Town {
            double x, y, spread, size;
        };
        const std::size_t town_count = std::max<std::size_t>(1, n / 20);
        std::vector<Town> towns(town_count);
        double total_size = 0.0;
        for (auto& t : towns) {
            t.x = rng.uniform(0.0, kAreaWidth);
            t.y = rng.uniform(0.0, kAreaHeight);
            t.spread = rng.uniform(3.0, 12.0);
            t.size = 1.0 / std::pow(1.0 - rng.uniform(), 1.0 / 1.5);
            total_size += t.size;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double pick = rng.uniform() * total_size;
            std::size_t t = 0;
            while (t + 1 < town_count && pick >= towns[t].size) pick -= towns[t++].size;
            sites[i].id = i;
            sites[i].x = rng.normal(towns[t].x, towns[t].spread);
            sites[i].y = rng.normal(towns[t].y, towns[t].spread);
        }
    }
    for (auto& s : sites) {
        s.load = detail::draw_load(rng);
        s.alpha = default_alpha(s.load);
    }
    return Instance(std::move(sites), std::min(k, n));
}

/// Weighted k-means (weights alpha * load) with m clusters; each cluster
/// becomes one site at its weighted centroid carrying the summed load and the
/// load-weighted mean alpha. k is clamped to m.
inline Instance downsample(const Instance& instance, std::size_t m, Rng& rng, std::size_t max_iterations = 300) {
    const auto& sites = instance.sites();
    const std::size_t n = sites.size();
    if (m == 0 || m > n) throw ParameterError("downsample size must lie in [1, n]");

    std::vector<Point> means(m);
    for (std::size_t c = 0; auto s : detail::sample_distinct(n, m, rng)) means[c++] = {sites[s].x, sites[s].y};

    std::vector<std::size_t> assignment(n, m);
    std::vector<std::size_t> members(m);
    for (std::size_t it = 0; it < max_iterations; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < m; ++c) {
                const double d = detail::distance(sites[i], means[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            changed |= assignment[i] != best;
            assignment[i] = best;
        }
        // An empty cluster takes over the site farthest (weighted) from its
        // own mean among clusters that can spare one.
        std::fill(members.begin(), members.end(), 0);
        for (auto c : assignment) ++members[c];
        for (std::size_t c = 0; c < m; ++c) {
            if (members[c] > 0) continue;
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (members[assignment[i]] < 2) continue;
                const double d = sites[i].weight() * detail::distance(sites[i], means[assignment[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            --members[assignment[far]];
            assignment[far] = c;
            members[c] = 1;
            means[c] = {sites[far].x, sites[far].y};
            changed = true;
        }
        std::vector<double> wx(m, 0.0), wy(m, 0.0), w(m, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = assignment[i];
            wx[c] += sites[i].weight() * sites[i].x;
            wy[c] += sites[i].weight() * sites[i].y;
            w[c] += sites[i].weight();
        }
        for (std::size_t c = 0; c < m; ++c) means[c] = {wx[c] / w[c], wy[c] / w[c]};
        if (!changed) break;
    }

    std::vector<double> load(m, 0.0), alpha_load(m, 0.0), weight(m, 0.0), wx(m, 0.0), wy(m, 0.0);
    std::vector<std::size_t> last(m, n);
    std::fill(members.begin(), members.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = assignment[i];
        load[c] += sites[i].load;
        alpha_load[c] += sites[i].alpha * sites[i].load;
        weight[c] += sites[i].weight();
        wx[c] += sites[i].weight() * sites[i].x;
        wy[c] += sites[i].weight() * sites[i].y;
        last[c] = i;
        ++members[c];
    }
    std::vector<ExchangeSite> out(m);
    for (std::size_t c = 0; c < m; ++c) {
        if (members[c] == 1) {
            out[c] = sites[last[c]];
        } else {
            out[c].x = wx[c] / weight[c];
            out[c].y = wy[c] / weight[c];
            out[c].load = load[c];
            out[c].alpha = alpha_load[c] / load[c];
        }
        out[c].id = c;
    }
    return Instance(std::move(out), std::min(instance.k(), m), instance.routing_factor());
}

enum class BenchMethod { Exact, RestrictedCBS, RestrictedKCN, LPExportOnly };

inline const char* to_string(BenchMethod method) {
    switch (method) {
        case BenchMethod::Exact: return "exact";
        case BenchMethod::RestrictedCBS: return "cbs";
        case BenchMethod::RestrictedKCN: return "kcn";
        case BenchMethod::LPExportOnly: return "lp";
    }
    return "?";
}

struct BenchParams {
    std::size_t nbruns = 30;
    std::size_t neighbors = 20;
    std::uint64_t seed = kDefaultSeed;
    std::optional<double> time_limit;
    std::size_t threads = 1;
    Linking linking = Linking::Strong;
};

struct BenchRecord {
    std::size_t n = 0;
    std::size_t k = 0;
    BenchMethod method = BenchMethod::Exact;
    SolveStatus status = SolveStatus::Optimal;
    std::optional<double> value;  // optimal or best found
    std::optional<double> gap_percent;
    double wall_time = 0.0;
    std::size_t nbruns = 0;
    std::size_t neighbors = 0;
    std::uint64_t seed = 0;
    std::string error;  // set when the cell failed with an exception
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline double gap_percent(double value, double optimum) {
    if (optimum == 0.0) return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return 100.0 * (value - optimum) / optimum;
}

/// Stream key for one (size, method) cell.
inline std::uint64_t cell_seed(std::uint64_t seed, std::size_t size, BenchMethod method) {
    return Rng::mix(Rng::mix(seed ^ size) + static_cast<std::uint64_t>(method));
}

inline void fill_from(BenchRecord& record, const SolveResult& result) {
    record.status = result.status;
    if (result.allocation) record.value = result.allocation->total_cost;
}

}  // namespace detail

/// Runs one method on one instance.
inline BenchRecord run_method(const Instance& instance, BenchMethod method, const BenchParams& params,
                              std::uint64_t seed) {
    BenchRecord record;
    record.n = instance.size();
    record.k = instance.k();
    record.method = method;
    record.seed = seed;
    SolveOptions options;
    options.time_limit = params.time_limit;
    options.threads = params.threads;
    options.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (method) {
            case BenchMethod::Exact: detail::fill_from(record, solve_exact(instance, options)); break;
            case BenchMethod::RestrictedCBS: {
                record.nbruns = params.nbruns;
                const auto map = sampling_points(instance, params.nbruns, instance.k(), seed, {params.threads});
                detail::fill_from(record, solve_restricted(instance, map, options));
                break;
            }
            case BenchMethod::RestrictedKCN: {
                record.neighbors = std::min(params.neighbors, instance.size());
                const auto map = kcn_candidates(instance, record.neighbors);
                detail::fill_from(record, solve_restricted(instance, map, options));
                break;
            }
            case BenchMethod::LPExportOnly: {
                std::ostringstream sink;
                export_lp(build_model(instance, {params.linking}), sink);
                break;
            }
        }
    } catch (const std::exception& e) {
        record.error = e.what();
    }
    record.wall_time = detail::seconds_since(start);
    return record;
}

/// For each size: downsample the master, then run every method. Gaps are
/// measured against the Exact row of the same size when it is optimal.
inline std::vector<BenchRecord> run_table(const Instance& master, const std::vector<std::size_t>& sizes,
                                          std::size_t k, const std::vector<BenchMethod>& methods,
                                          const BenchParams& params) {
    std::vector<BenchRecord> records;
    for (auto size : sizes) {
        std::vector<BenchRecord> rows;
        try {
            Rng rng = Rng::stream(params.seed, size);
            const auto instance = downsample(master, size, rng).with_k(k);
            for (auto method : methods) rows.push_back(run_method(instance, method, params, detail::cell_seed(params.seed, size, method)));
        } catch (const std::exception& e) {
            for (auto method : methods) {
                BenchRecord failed;
                failed.n = size;
                failed.k = k;
                failed.method = method;
                failed.error = e.what();
                rows.push_back(failed);
            }
        }
        std::optional<double> optimum;
        for (const auto& r : rows)
            if (r.method == BenchMethod::Exact && r.error.empty() && r.status == SolveStatus::Optimal) optimum = r.value;
        for (auto& r : rows) {
            if (optimum && r.value && r.error.empty()) r.gap_percent = detail::gap_percent(*r.value, *optimum);
            records.push_back(std::move(r));
        }
    }
    return records;
}

/// KCN over a list of neighbour counts, with gaps against one exact solve.
inline std::vector<BenchRecord> run_kcn_sweep(const Instance& instance, std::size_t k,
                                              const std::vector<std::size_t>& neighbor_values,
                                              const BenchParams& params, std::optional<double> optimum = {}) {
    const auto problem = instance.with_k(k);
    if (!optimum) {
        const auto exact = run_method(problem, BenchMethod::Exact, params, params.seed);
        if (exact.error.empty() && exact.status == SolveStatus::Optimal) optimum = exact.value;
    }
    std::vector<BenchRecord> records;
    for (auto neighbors : neighbor_values) {
        auto p = params;
        p.neighbors = neighbors;
        auto record = run_method(problem, BenchMethod::RestrictedKCN, p, params.seed);
        if (optimum && record.value && record.error.empty()) record.gap_percent = detail::gap_percent(*record.value, *optimum);
        records.push_back(std::move(record));
    }
    return records;
}

struct CsvOptions {
    bool timing = true;  // false leaves time_s empty so output is reproducible byte for byte
};

namespace detail {

inline std::string record_status(const BenchRecord& r) {
    if (!r.error.empty()) return "error";
    if (r.method == BenchMethod::LPExportOnly) return "exported";
    return to_string(r.status);
}

inline std::string record_params(const BenchRecord& r) {
    std::string out = "status=" + record_status(r);
    if (r.method == BenchMethod::RestrictedCBS) out += ";nbruns=" + std::to_string(r.nbruns);
    if (r.method == BenchMethod::RestrictedKCN) out += ";neighbors=" + std::to_string(r.neighbors);
    out += ";seed=" + std::to_string(r.seed);
    return out;
}

}  // namespace detail

/// `n,k,method,value,gap_percent,time_s,params`; value to 6 decimals, gap
/// in percent to 3 decimals.
inline void write_table_csv(std::ostream& out, const std::vector<BenchRecord>& records, CsvOptions options = {}) {
    out << "n,k,method,value,gap_percent,time_s,params\n";
    for (const auto& r : records) {
        out << r.n << ',' << r.k << ',' << to_string(r.method) << ','
            << (r.value ? detail::format_fixed(*r.value, 6) : "") << ','
            << (r.gap_percent ? detail::format_fixed(*r.gap_percent, 3) : "") << ','
            << (options.timing ? detail::format_fixed(r.wall_time, 3) : "") << ',' << detail::record_params(r)
            << '\n';
    }
}

/// Plot data for the sweep: one row per neighbour count.
inline void write_sweep_csv(std::ostream& out, const std::vector<BenchRecord>& records, CsvOptions options = {}) {
    out << "neighbors,status,value,gap_percent,time_s\n";
    for (const auto& r : records) {
        out << r.neighbors << ',' << detail::record_status(r) << ','
            << (r.value ? detail::format_fixed(*r.value, 6) : "") << ','
            << (r.gap_percent ? detail::format_fixed(*r.gap_percent, 3) : "") << ','
            << (options.timing ? detail::format_fixed(r.wall_time, 3) : "") << '\n';
    }
}

}  // namespace duocover
