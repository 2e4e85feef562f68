#pragma once

// Slow reference implementations for the tests. They only share data types
// with the library.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <duocover/core.hpp>
#include <duocover/rng.hpp>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;
using Sets = std::vector<std::vector<std::size_t>>;

inline Matrix cost_matrix(const duocover::Instance& inst) {
    const auto n = inst.size();
    Matrix c(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto& a = inst.site(i);
            const auto& b = inst.site(j);
            c[i][j] = inst.routing_factor() * std::hypot(a.x - b.x, a.y - b.y) * a.alpha * a.load;
        }
    return c;
}

/// Each row sorts its allowed open columns fully and pays for the first two.
inline std::optional<double> allocation_cost(const Matrix& c, const std::vector<std::size_t>& open,
                                             const Sets* pos = nullptr) {
    double total = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::vector<std::pair<double, std::size_t>> row;
        for (auto j : open)
            if (!pos || std::find((*pos)[i].begin(), (*pos)[i].end(), j) != (*pos)[i].end())
                row.emplace_back(c[i][j], j);
        if (row.size() < 2) return std::nullopt;
        std::sort(row.begin(), row.end());
        total += row[0].first + row[1].first;
    }
    return total;
}

struct Best {
    bool feasible = false;
    double value = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> open;  // lexicographically smallest optimum
};

/// Calls fn on every k-subset of 0..n-1 in lexicographic order.
template <class Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
    if (k > n) return;
    std::vector<bool> mask(n, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
    do {
        std::vector<std::size_t> pick;
        for (std::size_t j = 0; j < n; ++j)
            if (mask[j]) pick.push_back(j);
        fn(pick);
    } while (std::prev_permutation(mask.begin(), mask.end()));
}

inline Best enumerate_dcp(const Matrix& c, std::size_t k, const Sets* pos = nullptr) {
    Best best;
    const std::size_t cols = c.empty() ? 0 : c[0].size();
    for_each_subset(cols, k, [&](const std::vector<std::size_t>& pick) {
        const auto value = allocation_cost(c, pick, pos);
        if (!value) return;
        if (!best.feasible || *value < best.value - 1e-9 * std::max(1.0, std::abs(best.value))) {
            best.feasible = true;
            best.value = *value;
            best.open = pick;
        }
    });
    return best;
}

inline bool double_cover_exists(std::size_t n, std::size_t k, const Sets& pos) {
    bool found = false;
    for_each_subset(n, k, [&](const std::vector<std::size_t>& pick) {
        if (found) return;
        bool ok = true;
        for (const auto& row : pos) {
            std::size_t hits = 0;
            for (auto j : row) hits += std::binary_search(pick.begin(), pick.end(), j);
            if (hits < 2) {
                ok = false;
                break;
            }
        }
        found = ok;
    });
    return found;
}

/// Minimum over k-subsets of the sum of each row's cheapest open column.
inline double enumerate_scp(const Matrix& c, std::size_t k) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t cols = c.empty() ? 0 : c[0].size();
    for_each_subset(cols, k, [&](const std::vector<std::size_t>& pick) {
        double total = 0.0;
        for (const auto& row : c) {
            double m = std::numeric_limits<double>::infinity();
            for (auto j : pick) m = std::min(m, row[j]);
            total += m;
        }
        best = std::min(best, total);
    });
    return best;
}

inline bool hitting_set_exists(std::size_t universe, const Sets& sets, std::size_t m) {
    for (std::size_t size = 0; size <= m; ++size) {
        bool found = false;
        for_each_subset(universe, size, [&](const std::vector<std::size_t>& pick) {
            if (found) return;
            found = std::all_of(sets.begin(), sets.end(), [&](const std::vector<std::size_t>& s) {
                return std::any_of(s.begin(), s.end(),
                                   [&](std::size_t e) { return std::binary_search(pick.begin(), pick.end(), e); });
            });
        });
        if (found) return true;
    }
    return false;
}

/// Random geometric instance with ids 0..n-1.
inline duocover::Instance random_instance(duocover::Rng& rng, std::size_t n, std::size_t k, bool towns) {
    std::vector<duocover::ExchangeSite> sites(n);
    std::vector<std::pair<double, double>> centres;
    for (int t = 0; t < 3; ++t) centres.emplace_back(rng.uniform(0, 100), rng.uniform(0, 100));
    for (std::size_t i = 0; i < n; ++i) {
        auto& s = sites[i];
        s.id = i;
        if (towns) {
            const auto& c = centres[rng.below(centres.size())];
            s.x = c.first + rng.normal(0, 6);
            s.y = c.second + rng.normal(0, 6);
        } else {
            s.x = rng.uniform(0, 100);
            s.y = rng.uniform(0, 100);
        }
        s.load = 1.0 + std::floor(rng.uniform(0, 500));
        s.alpha = 1.0 / (1.0 + std::log10(s.load));
    }
    return duocover::Instance(std::move(sites), k, 1.6);
}

// ---- LP text -----------------------------------------------------------

struct LpRow {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    std::string sense;
    double rhs = 0.0;
};

struct LpModel {
    std::vector<std::pair<std::string, double>> objective;
    std::vector<LpRow> rows;
    std::vector<std::string> binaries;
};

inline std::vector<std::pair<std::string, double>> parse_terms(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::pair<std::string, double>> terms;
    std::string token;
    double sign = 1.0;
    std::optional<double> coef;
    while (in >> token) {
        if (token == "+") {
            sign = 1.0;
        } else if (token == "-") {
            sign = -1.0;
        } else if (std::isdigit(static_cast<unsigned char>(token[0])) || token[0] == '.') {
            coef = std::stod(token);
        } else {
            terms.emplace_back(token, sign * coef.value_or(1.0));
            sign = 1.0;
            coef.reset();
        }
    }
    return terms;
}

inline LpModel parse_lp(const std::string& text) {
    LpModel model;
    std::istringstream in(text);
    std::string line, section, objective_text;
    std::vector<std::string> statements;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '\\') continue;
        const auto first = line.find_first_not_of(' ');
        if (first == std::string::npos) continue;
        const auto body = line.substr(first);
        if (body == "Minimize" || body == "Subject To" || body == "Binary" || body == "End") {
            section = body;
            continue;
        }
        if (section == "Minimize") {
            objective_text += ' ' + (body.find(':') != std::string::npos ? body.substr(body.find(':') + 1) : body);
        } else if (section == "Subject To") {
            if (body.find(':') != std::string::npos) statements.push_back(body);
            else statements.back() += ' ' + body;
        } else if (section == "Binary") {
            std::istringstream names(body);
            std::string name;
            while (names >> name) model.binaries.push_back(name);
        }
    }
    model.objective = parse_terms(objective_text);
    for (const auto& s : statements) {
        LpRow row;
        const auto colon = s.find(':');
        row.name = s.substr(0, colon);
        auto rest = s.substr(colon + 1);
        std::size_t op = std::string::npos;
        for (const char* candidate : {">=", "<=", "="}) {
            op = rest.find(candidate);
            if (op != std::string::npos) {
                row.sense = candidate;
                break;
            }
        }
        row.terms = parse_terms(rest.substr(0, op));
        row.rhs = std::stod(rest.substr(op + row.sense.size()));
        model.rows.push_back(std::move(row));
    }
    return model;
}

/// Optimum of a parsed DCP model by enumerating the y variables of the
/// cardinality row; each assignment row then takes its cheapest x variables
/// whose linked y is open. Every row is checked on the result.
inline std::optional<double> brute_force_lp(const LpModel& lp) {
    std::map<std::string, double> cost;
    for (const auto& [name, c] : lp.objective) cost[name] += c;
    const LpRow* card = nullptr;
    std::vector<const LpRow*> assign;
    std::map<std::string, std::string> linked;  // x -> y
    for (const auto& row : lp.rows) {
        if (row.name == "card") card = &row;
        else if (row.name.rfind("assign_", 0) == 0) assign.push_back(&row);
        else {
            std::string y;
            for (const auto& [name, c] : row.terms)
                if (c > 0) y = name;
            for (const auto& [name, c] : row.terms)
                if (c < 0) linked[name] = y;
        }
    }
    if (!card) return std::nullopt;
    std::vector<std::string> ys;
    for (const auto& [name, c] : card->terms) ys.push_back(name);
    const auto k = static_cast<std::size_t>(card->rhs);
    std::optional<double> best;
    for_each_subset(ys.size(), k, [&](const std::vector<std::size_t>& pick) {
        std::map<std::string, double> value;
        for (auto p : pick) value[ys[p]] = 1.0;
        for (const auto* row : assign) {
            std::vector<std::pair<double, std::string>> options;
            for (const auto& [name, c] : row->terms)
                if (value.count(linked[name])) options.emplace_back(cost[name], name);
            std::sort(options.begin(), options.end());
            const auto need = static_cast<std::size_t>(row->rhs);
            if (options.size() < need) return;
            for (std::size_t t = 0; t < need; ++t) value[options[t].second] = 1.0;
        }
        for (const auto& row : lp.rows) {
            double lhs = 0.0;
            for (const auto& [name, c] : row.terms) lhs += c * (value.count(name) ? value[name] : 0.0);
            const bool ok = row.sense == "=" ? std::abs(lhs - row.rhs) < 1e-9
                          : row.sense == ">=" ? lhs >= row.rhs - 1e-9
                                              : lhs <= row.rhs + 1e-9;
            if (!ok) return;
        }
        double total = 0.0;
        for (const auto& [name, v] : value) total += cost[name] * v;
        if (!best || total < *best) best = total;
    });
    return best;
}

}  // namespace oracle
