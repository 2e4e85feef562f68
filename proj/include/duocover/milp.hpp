#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "candidates.hpp"
#include "core.hpp"
#include "io.hpp"

namespace duocover {

/// How open-node variables y_j are tied to assignment variables x_ij.
enum class Linking {
    Strong,  // link_i_j: y_j - x_i_j >= 0, one row per x variable
    Weak,    // wlink_j: n y_j - sum_i x_i_j >= 0, one row per column
};

inline const char* to_string(Linking linking) { return linking == Linking::Strong ? "strong" : "weak"; }

enum class RowSense { Equal, GreaterEqual, LessEqual };

struct LinearTerm {
    double coefficient = 0.0;
    std::size_t variable = 0;
};

struct LinearRow {
    std::string name;
    std::vector<LinearTerm> terms;
    RowSense sense = RowSense::Equal;
    double rhs = 0.0;
};

/// Binary program for the double coverage problem.
///
/// Variables are x_{i}_{j} (site i parented on site j, only for j in Pos(i))
/// followed by y_{j} (metro node at site j); all binary. Rows are assign_{i},
/// then the linking rows, then card.
///
/// The assignment rows do not force x onto the two cheapest open nodes; an
/// optimal solution does pick them, so the model optimum equals the DCP
/// optimum while a merely feasible solution need not be a DCP allocation.
struct MilpModel {
    std::size_t n = 0;
    std::size_t k = 0;
    Linking linking = Linking::Strong;

    std::vector<std::string> variable_names;
    std::vector<double> objective;  // per variable
    std::vector<LinearRow> rows;

    // x variables occupy [0, x_count); variable x_count + j is y_j.
    std::size_t x_count = 0;
    std::vector<std::pair<SiteId, SiteId>> x_pairs;  // (i, j) per x variable

    std::size_t variable_count() const { return variable_names.size(); }
    std::size_t y_variable(SiteId j) const { return x_count + j; }
};

struct ModelOptions {
    Linking linking = Linking::Strong;
    /// Weak rows use the column's own x count instead of n.
    bool tight_weak_coefficient = false;
};

inline std::string x_name(SiteId i, SiteId j) { return "x_" + std::to_string(i) + "_" + std::to_string(j); }
inline std::string y_name(SiteId j) { return "y_" + std::to_string(j); }

inline MilpModel build_model(const Instance& instance, const CandidateMap* candidates, ModelOptions options = {}) {
    const std::size_t n = instance.size();
    if (candidates && (candidates->rows() != n || candidates->columns() != n))
        throw ParameterError("candidate map does not match the instance");
    const CostMatrix costs(instance);

    MilpModel model;
    model.n = n;
    model.k = instance.k();
    model.linking = options.linking;

    std::vector<std::vector<std::size_t>> column_vars(n);
    std::vector<std::vector<std::size_t>> row_vars(n);
    for (SiteId i = 0; i < n; ++i) {
        auto add = [&](SiteId j) {
            const auto v = model.variable_names.size();
            model.variable_names.push_back(x_name(i, j));
            model.objective.push_back(costs(i, j));
            model.x_pairs.emplace_back(i, j);
            row_vars[i].push_back(v);
            column_vars[j].push_back(v);
        };
        if (candidates) {
            for (SiteId j : (*candidates)[i]) add(j);
        } else {
            for (SiteId j = 0; j < n; ++j) add(j);
        }
    }
    model.x_count = model.variable_names.size();
    for (SiteId j = 0; j < n; ++j) {
        model.variable_names.push_back(y_name(j));
        model.objective.push_back(0.0);
    }

    for (SiteId i = 0; i < n; ++i) {
        LinearRow row{"assign_" + std::to_string(i), {}, RowSense::Equal, 2.0};
        for (auto v : row_vars[i]) row.terms.push_back({1.0, v});
        model.rows.push_back(std::move(row));
    }
    if (options.linking == Linking::Strong) {
        for (std::size_t v = 0; v < model.x_count; ++v) {
            const auto [i, j] = model.x_pairs[v];
            model.rows.push_back({"link_" + std::to_string(i) + "_" + std::to_string(j),
                                  {{1.0, model.y_variable(j)}, {-1.0, v}},
                                  RowSense::GreaterEqual,
                                  0.0});
        }
    } else {
        for (SiteId j = 0; j < n; ++j) {
            const double big = options.tight_weak_coefficient ? static_cast<double>(column_vars[j].size())
                                                              : static_cast<double>(n);
            LinearRow row{"wlink_" + std::to_string(j), {{big, model.y_variable(j)}}, RowSense::GreaterEqual, 0.0};
            for (auto v : column_vars[j]) row.terms.push_back({-1.0, v});
            model.rows.push_back(std::move(row));
        }
    }
    LinearRow card{"card", {}, RowSense::Equal, static_cast<double>(model.k)};
    for (SiteId j = 0; j < n; ++j) card.terms.push_back({1.0, model.y_variable(j)});
    model.rows.push_back(std::move(card));
    return model;
}

inline MilpModel build_model(const Instance& instance, ModelOptions options = {}) {
    return build_model(instance, nullptr, options);
}

namespace detail {

inline std::string lp_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Writes `terms` as an LP expression, wrapping long lines.
inline void write_expression(std::ostream& out, const MilpModel& model, const std::vector<LinearTerm>& terms,
                             bool keep_zero) {
    constexpr std::size_t kTermsPerLine = 8;
    std::size_t written = 0;
    for (const auto& term : terms) {
        if (term.coefficient == 0.0 && !keep_zero) continue;
        if (written > 0 && written % kTermsPerLine == 0) out << "\n   ";
        const bool negative = std::signbit(term.coefficient) && term.coefficient != 0.0;
        const double magnitude = std::abs(term.coefficient);
        if (written == 0) out << (negative ? "- " : "");
        else out << (negative ? " - " : " + ");
        if (magnitude != 1.0) out << lp_number(magnitude) << ' ';
        out << model.variable_names[term.variable];
        ++written;
    }
    if (written == 0) out << "0 " << model.variable_names.front();
}

}  // namespace detail

/// Writes the model in CPLEX LP format with 12 significant digits.
inline void export_lp(const MilpModel& model, std::ostream& out) {
    out << "\\ Double coverage problem: n=" << model.n << " k=" << model.k
        << " linking=" << to_string(model.linking) << '\n';
    out << "Minimize\n obj: ";
    std::vector<LinearTerm> objective;
    for (std::size_t v = 0; v < model.x_count; ++v) objective.push_back({model.objective[v], v});
    detail::write_expression(out, model, objective, true);
    out << "\nSubject To\n";
    for (const auto& row : model.rows) {
        out << ' ' << row.name << ": ";
        detail::write_expression(out, model, row.terms, false);
        out << (row.sense == RowSense::Equal ? " = " : row.sense == RowSense::GreaterEqual ? " >= " : " <= ")
            << detail::lp_number(row.rhs) << '\n';
    }
    out << "Binary\n";
    for (std::size_t v = 0; v < model.variable_count(); ++v) {
        out << ' ' << model.variable_names[v];
        if (v % 8 == 7 || v + 1 == model.variable_count()) out << '\n';
    }
    out << "End\n";
    if (!out) throw std::runtime_error("failed writing LP output");
}

/// Reads `name value` lines produced from an external solver's solution.
inline std::vector<double> read_solution(std::istream& in, const MilpModel& model) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t v = 0; v < model.variable_count(); ++v) index.emplace(model.variable_names[v], v);
    std::vector<double> values(model.variable_count(), 0.0);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = detail::trim(line);
        if (text.empty() || text.front() == '#') continue;
        std::istringstream fields{std::string(text)};
        std::string name, value, extra;
        if (!(fields >> name >> value) || (fields >> extra)) throw ParseError(line_no, "expected 'name value'");
        const auto it = index.find(name);
        if (it == index.end()) throw ParseError(line_no, "unknown variable '" + name + "'");
        values[it->second] = detail::parse_double(value, line_no, "value");
    }
    return values;
}

/// Maps a 0/1 solution back to an Allocation. Each site's two chosen nodes
/// are ordered by cost (ties to the lower id).
inline Allocation allocation_from_solution(const MilpModel& model, const CostMatrix& costs,
                                           const std::vector<double>& values) {
    if (values.size() != model.variable_count()) throw ParameterError("solution size does not match the model");
    Allocation result;
    for (SiteId j = 0; j < model.n; ++j)
        if (values[model.y_variable(j)] > 0.5) result.open.push_back(j);
    if (result.open.size() != model.k) throw ParameterError("solution does not open k metro nodes");
    std::vector<std::vector<SiteId>> parents(model.n);
    for (std::size_t v = 0; v < model.x_count; ++v)
        if (values[v] > 0.5) {
            const auto [i, j] = model.x_pairs[v];
            if (!std::binary_search(result.open.begin(), result.open.end(), j))
                throw ParameterError(x_name(i, j) + " uses a closed metro node");
            parents[i].push_back(j);
        }
    result.primary.resize(model.n);
    result.secondary.resize(model.n);
    for (SiteId i = 0; i < model.n; ++i) {
        auto& p = parents[i];
        if (p.size() != 2) throw ParameterError("site " + std::to_string(i) + " is not parented twice");
        if (costs(i, p[1]) < costs(i, p[0]) || (costs(i, p[1]) == costs(i, p[0]) && p[1] < p[0])) std::swap(p[0], p[1]);
        result.primary[i] = p[0];
        result.secondary[i] = p[1];
        result.total_cost += costs(i, p[0]) + costs(i, p[1]);
    }
    return result;
}

}  // namespace duocover
