#include <gtest/gtest.h>

#include <duocover/clustering.hpp>
#include <duocover/feasibility.hpp>
#include <duocover/solver.hpp>

#include "support/oracles.hpp"

using namespace duocover;

namespace {

Instance collinear(std::size_t n, std::size_t k) {
    std::vector<ExchangeSite> sites(n);
    for (std::size_t i = 0; i < n; ++i) sites[i] = {i, static_cast<double>(i), 0.0, 1.0, 1.0};
    return Instance(sites, k, 1.0);
}

CostMatrix to_costs(const oracle::Matrix& c) {
    std::vector<double> data;
    for (const auto& row : c) data.insert(data.end(), row.begin(), row.end());
    return CostMatrix(c.size(), c.empty() ? 0 : c[0].size(), data);
}

oracle::Sets to_sets(const CandidateMap& map) {
    oracle::Sets out;
    for (const auto& row : map.sets()) out.emplace_back(row.begin(), row.end());
    return out;
}

CandidateMap random_map(Rng& rng, std::size_t n, std::size_t min_size, std::size_t max_size) {
    std::vector<std::vector<SiteId>> pos(n);
    for (auto& row : pos) {
        const auto size = min_size + rng.below(max_size - min_size + 1);
        while (row.size() < size) {
            const SiteId j = rng.below(n);
            if (std::find(row.begin(), row.end(), j) == row.end()) row.push_back(j);
        }
    }
    return CandidateMap(n, pos, CandidateSource::CBS);
}

}  // namespace

TEST(Exact, CollinearFour) {
    const auto r = solve_exact(collinear(4, 2));
    ASSERT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_DOUBLE_EQ(r.allocation->total_cost, 8.0);
    EXPECT_EQ(r.allocation->open, (std::vector<SiteId>{1, 2}));
}

TEST(Exact, AllSitesOpen) {
    Rng rng(2);
    const auto inst = oracle::random_instance(rng, 7, 7, true);
    const auto r = solve_exact(inst);
    const auto c = oracle::cost_matrix(inst);
    std::vector<std::size_t> all{0, 1, 2, 3, 4, 5, 6};
    EXPECT_TRUE(costs_equal(r.allocation->total_cost, *oracle::allocation_cost(c, all)));
}

TEST(Exact, MatchesEnumeration) {
    Rng rng(101);
    for (int t = 0; t < 60; ++t) {
        const std::size_t n = 4 + rng.below(12);
        const std::size_t k = 2 + rng.below(std::min<std::size_t>(n - 1, 5));
        const auto inst = oracle::random_instance(rng, n, k, t % 2 == 0);
        const auto c = oracle::cost_matrix(inst);
        const auto best = oracle::enumerate_dcp(c, k);
        SolveOptions opts;
        opts.threads = 1 + t % 3;
        const auto r = solve_exact(inst, opts);
        ASSERT_EQ(r.status, SolveStatus::Optimal);
        EXPECT_TRUE(costs_equal(r.allocation->total_cost, best.value)) << r.allocation->total_cost << " vs " << best.value;
        EXPECT_TRUE(costs_equal(*oracle::allocation_cost(c, r.allocation->open), r.allocation->total_cost));
        EXPECT_LE(r.bound, r.allocation->total_cost * (1 + 1e-9));
    }
}

TEST(Exact, NonGeometricMatrix) {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 5 + rng.below(6);
        oracle::Matrix c(n, std::vector<double>(n));
        for (auto& row : c)
            for (auto& v : row) v = std::floor(rng.uniform(0, 20));
        const std::size_t k = 2 + rng.below(3);
        const auto r = solve_exact(to_costs(c), k);
        EXPECT_TRUE(costs_equal(r.allocation->total_cost, oracle::enumerate_dcp(c, k).value));
    }
}

TEST(Restricted, FullMapEqualsExact) {
    Rng rng(12);
    const auto inst = oracle::random_instance(rng, 14, 4, true);
    const auto a = solve_exact(inst);
    const auto b = solve_restricted(inst, CandidateMap::full(14));
    EXPECT_TRUE(costs_equal(a.allocation->total_cost, b.allocation->total_cost));
}

TEST(Restricted, SingletonMapIsInfeasible) {
    const auto inst = collinear(5, 2);
    const auto r = solve_restricted(inst, kcn_candidates(inst, 1));
    EXPECT_EQ(r.status, SolveStatus::Infeasible);
    EXPECT_FALSE(r.allocation);
}

TEST(Restricted, MatchesEnumerationAndDominatesExact) {
    Rng rng(23);
    int feasible = 0;
    for (int t = 0; t < 80; ++t) {
        const std::size_t n = 5 + rng.below(9);
        const std::size_t k = 2 + rng.below(std::min<std::size_t>(n - 1, 5));
        const auto inst = oracle::random_instance(rng, n, k, true);
        const auto map = random_map(rng, n, 2, std::min<std::size_t>(n, 5));
        const auto c = oracle::cost_matrix(inst);
        const auto sets = to_sets(map);
        const auto best = oracle::enumerate_dcp(c, k, &sets);
        const auto r = solve_restricted(inst, map);
        ASSERT_EQ(r.status == SolveStatus::Optimal, best.feasible);
        if (!best.feasible) continue;
        ++feasible;
        EXPECT_TRUE(costs_equal(r.allocation->total_cost, best.value));
        EXPECT_GE(r.allocation->total_cost, oracle::enumerate_dcp(c, k).value * (1 - 1e-12));
        for (SiteId i = 0; i < n; ++i) {
            EXPECT_TRUE(map.allows(i, r.allocation->primary[i]));
            EXPECT_TRUE(map.allows(i, r.allocation->secondary[i]));
        }
    }
    EXPECT_GT(feasible, 10);
}

TEST(Restricted, LargerMapNeverWorse) {
    Rng rng(44);
    const auto inst = oracle::random_instance(rng, 40, 6, true);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t nb = 4; nb <= 40; nb += 6) {
        const auto r = solve_restricted(inst, kcn_candidates(inst, nb));
        if (r.status != SolveStatus::Optimal) continue;
        EXPECT_LE(r.allocation->total_cost, previous * (1 + 1e-12));
        previous = r.allocation->total_cost;
    }
    EXPECT_TRUE(std::isfinite(previous));
}

TEST(Exact, TimeLimitReportsBound) {
    Rng rng(9);
    const auto inst = oracle::random_instance(rng, 60, 8, false);
    SolveOptions opts;
    opts.time_limit = 0.0;
    const auto r = solve_exact(inst, opts);
    ASSERT_NE(r.status, SolveStatus::Infeasible);
    ASSERT_TRUE(r.allocation);
    EXPECT_LE(r.bound, r.allocation->total_cost * (1 + 1e-9));
}

TEST(Feasibility, MatchesBruteForce) {
    Rng rng(61);
    int yes = 0, no = 0;
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 4 + rng.below(9);
        const std::size_t k = 2 + rng.below(n - 1);
        const auto map = random_map(rng, n, 1 + (t % 4 != 0), std::min<std::size_t>(n, 4));
        const auto sets = to_sets(map);
        const bool expected = oracle::double_cover_exists(n, k, sets);
        const auto r = check_feasible(n, k, map);
        ASSERT_EQ(r.feasible, expected);
        if (r.feasible) {
            ++yes;
            ASSERT_EQ(r.witness.size(), k);
            for (const auto& row : sets) {
                std::size_t hits = 0;
                for (auto j : row) hits += std::binary_search(r.witness.begin(), r.witness.end(), j);
                EXPECT_GE(hits, 2u);
            }
        } else {
            ++no;
            ASSERT_FALSE(r.certificate.empty());
            oracle::Sets sub;
            for (auto i : r.certificate) sub.push_back(sets[i]);
            EXPECT_FALSE(oracle::double_cover_exists(n, k, sub));
        }
    }
    EXPECT_GT(yes, 30);
    EXPECT_GT(no, 30);
}

TEST(Feasibility, SharedPairAndDisjointPairs) {
    // Every site allows {0,1}: k = 2 suffices.
    const auto shared = CandidateMap(5, std::vector<std::vector<SiteId>>(5, {0, 1}), CandidateSource::CBS);
    const auto r = check_feasible(5, 2, shared);
    EXPECT_TRUE(r.feasible);
    EXPECT_EQ(r.witness, (std::vector<SiteId>{0, 1}));
    // Three disjoint pairs need six open columns.
    const CandidateMap disjoint(6, {{0, 1}, {2, 3}, {4, 5}, {0, 1}, {2, 3}, {4, 5}}, CandidateSource::CBS);
    EXPECT_FALSE(check_feasible(6, 5, disjoint).feasible);
    EXPECT_TRUE(check_feasible(6, 6, disjoint).feasible);
    const CandidateMap singleton(3, {{0, 1}, {2}, {0, 2}}, CandidateSource::CBS);
    EXPECT_EQ(check_feasible(3, 3, singleton).certificate, (std::vector<SiteId>{1}));
}

TEST(Feasibility, CbsMapsOnLargerInstances) {
    Rng rng(71);
    const auto inst = oracle::random_instance(rng, 150, 10, true);
    const auto map = sampling_points(inst, 5, 10, 3);
    const auto r = check_feasible(150, 10, map);
    ASSERT_TRUE(r.feasible);
    EXPECT_TRUE(evaluate_restricted(CostMatrix(inst), &map, r.witness).has_value());
}

TEST(Json, Fields) {
    const auto r = solve_exact(collinear(4, 2));
    const auto doc = to_json(r);
    EXPECT_EQ(doc["status"], "optimal");
    EXPECT_EQ(doc["total_cost"].get<double>(), 8.0);
    EXPECT_EQ(doc["open"], nlohmann::json::parse("[1,2]"));
    EXPECT_EQ(doc["primary"].size(), 4u);
    EXPECT_TRUE(doc.contains("nodes_explored"));
    EXPECT_EQ(to_json(r, false)["wall_time"].get<double>(), 0.0);
    SolveResult none;
    EXPECT_TRUE(to_json(none)["total_cost"].is_null());
    EXPECT_EQ(to_json(none)["status"], "infeasible");
}
