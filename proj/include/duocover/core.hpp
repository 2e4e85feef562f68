#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace duocover {

using SiteId = std::size_t;

/// Invalid sizes, budgets or tuning parameters.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An open set that cannot give every site two distinct parents.
class InfeasibleEvaluation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr double kDefaultRoutingFactor = 1.6;

struct ExchangeSite {
    SiteId id = 0;
    double x = 0.0;  // km
    double y = 0.0;  // km
    double load = 1.0;
    double alpha = 1.0;

    /// Clustering weight, alpha * load.
    double weight() const { return alpha * load; }
};

inline double distance(double ax, double ay, double bx, double by) {
    const double dx = ax - bx;
    const double dy = ay - by;
    return std::sqrt(dx * dx + dy * dy);
}

inline double distance(const ExchangeSite& a, const ExchangeSite& b) {
    return distance(a.x, a.y, b.x, b.y);
}

/// Default fibre-sharing coefficient for a site with the given load.
inline double default_alpha(double load) { return 1.0 / (1.0 + std::log10(std::max(load, 1.0))); }

class Instance {
public:
    Instance() = default;

    Instance(std::vector<ExchangeSite> sites, std::size_t k, double routing_factor = kDefaultRoutingFactor)
        : sites_(std::move(sites)), k_(k), routing_factor_(routing_factor) {
        for (std::size_t i = 0; i < sites_.size(); ++i) {
            const auto& s = sites_[i];
            if (s.id != i) throw ParameterError("site ids must be contiguous 0..n-1 in order");
            if (!(s.load > 0.0)) throw ParameterError("site " + std::to_string(i) + ": load must be positive");
            if (!(s.alpha > 0.0)) throw ParameterError("site " + std::to_string(i) + ": alpha must be positive");
            if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.load) || !std::isfinite(s.alpha))
                throw ParameterError("site " + std::to_string(i) + ": non-finite field");
        }
        if (k_ == 0) throw ParameterError("k must be positive");
        if (k_ > sites_.size()) throw ParameterError("k must not exceed the number of sites");
        if (!(routing_factor_ > 0.0) || !std::isfinite(routing_factor_))
            throw ParameterError("routing factor must be positive");
    }

    const std::vector<ExchangeSite>& sites() const { return sites_; }
    const ExchangeSite& site(SiteId i) const { return sites_.at(i); }
    std::size_t size() const { return sites_.size(); }
    std::size_t k() const { return k_; }
    double routing_factor() const { return routing_factor_; }

    Instance with_k(std::size_t k) const { return Instance(sites_, k, routing_factor_); }

private:
    std::vector<ExchangeSite> sites_;
    std::size_t k_ = 0;
    double routing_factor_ = kDefaultRoutingFactor;
};

/// Fibre cost of parenting site i on a metro node placed at site j.
inline double cost(const Instance& instance, SiteId i, SiteId j) {
    if (i >= instance.size() || j >= instance.size()) throw std::out_of_range("site id out of range");
    const auto& a = instance.sites()[i];
    const auto& b = instance.sites()[j];
    return instance.routing_factor() * distance(a, b) * a.alpha * a.load;
}

/// Allocation costs from demand rows to candidate columns.
///
/// Geometric instances give a square matrix; reduction instances use an
/// arbitrary rectangular one. Geometric matrices above kMaterializeLimit
/// sites are evaluated on demand instead of stored.
class CostMatrix {
public:
    static constexpr std::size_t kMaterializeLimit = 4096;

    CostMatrix() = default;

    CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)), dense_(true) {
        if (data_.size() != rows_ * cols_) throw ParameterError("cost matrix data has wrong size");
        for (double v : data_)
            if (!std::isfinite(v)) throw ParameterError("cost matrix entries must be finite");
    }

    explicit CostMatrix(const Instance& instance)
        : rows_(instance.size()), cols_(instance.size()), routing_factor_(instance.routing_factor()) {
        points_.reserve(rows_);
        for (const auto& s : instance.sites()) points_.push_back({s.x, s.y, s.alpha * s.load});
        if (rows_ <= kMaterializeLimit) {
            data_.resize(rows_ * cols_);
            for (std::size_t i = 0; i < rows_; ++i)
                for (std::size_t j = 0; j < cols_; ++j) data_[i * cols_ + j] = compute(i, j);
            dense_ = true;
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool materialized() const { return dense_; }

    double operator()(std::size_t i, std::size_t j) const {
        return dense_ ? data_[i * cols_ + j] : compute(i, j);
    }

    double at(std::size_t i, std::size_t j) const {
        if (i >= rows_ || j >= cols_) throw std::out_of_range("cost matrix index out of range");
        return (*this)(i, j);
    }

private:
    struct Point {
        double x;
        double y;
        double weight;
    };

    double compute(std::size_t i, std::size_t j) const {
        const auto& a = points_[i];
        const auto& b = points_[j];
        return routing_factor_ * distance(a.x, a.y, b.x, b.y) * a.weight;
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
    std::vector<Point> points_;
    double routing_factor_ = kDefaultRoutingFactor;
    bool dense_ = false;
};

/// An open metro-node set with each site's two parents.
struct Allocation {
    std::vector<SiteId> open;  // sorted
    std::vector<SiteId> primary;
    std::vector<SiteId> secondary;
    double total_cost = 0.0;
};

namespace detail {

inline std::vector<SiteId> normalized_open(std::span<const SiteId> open, std::size_t cols) {
    std::vector<SiteId> sorted(open.begin(), open.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (!sorted.empty() && sorted.back() >= cols) throw std::out_of_range("open site id out of range");
    return sorted;
}

}  // namespace detail

/// Parents every row on its two cheapest open columns (ties to the lower id).
inline Allocation evaluate(const CostMatrix& costs, std::span<const SiteId> open) {
    Allocation result;
    result.open = detail::normalized_open(open, costs.cols());
    if (result.open.size() < 2) throw InfeasibleEvaluation("need at least two open metro nodes");
    const auto n = costs.rows();
    result.primary.resize(n);
    result.secondary.resize(n);
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double best = inf;
        double second = inf;
        SiteId best_id = 0;
        SiteId second_id = 0;
        for (SiteId j : result.open) {
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
        result.primary[i] = best_id;
        result.secondary[i] = second_id;
        result.total_cost += best + second;
    }
    return result;
}

inline Allocation evaluate(const Instance& instance, std::span<const SiteId> open) {
    const auto normalized = detail::normalized_open(open, instance.size());
    if (normalized.size() < 2) throw InfeasibleEvaluation("need at least two open metro nodes");
    if (normalized.size() != instance.k())
        throw ParameterError("open set size " + std::to_string(normalized.size()) + " differs from k = " +
                             std::to_string(instance.k()));
    return evaluate(CostMatrix(instance), normalized);
}

inline bool costs_equal(double a, double b, double rel_tol = 1e-9) {
    return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace duocover
