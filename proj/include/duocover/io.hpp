#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "core.hpp"

namespace duocover {

/// Malformed input file; `line()` is 1-based, 0 when not line-specific.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message, const std::string& source = {})
        : std::runtime_error((source.empty() ? "" : source + ": ") +
                             (line ? "line " + std::to_string(line) + ": " : "") + message),
          line_(line), message_(message) {}

    std::size_t line() const { return line_; }

    ParseError in_source(const std::string& source) const { return ParseError(line_, message_, source); }

private:
    std::size_t line_;
    std::string message_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

inline double parse_double(std::string_view field, std::size_t line, std::string_view what) {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end || field.empty())
        throw ParseError(line, "invalid " + std::string(what) + " '" + std::string(field) + "'");
    return value;
}

inline std::size_t parse_index(std::string_view field, std::size_t line, std::string_view what) {
    std::size_t value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end || field.empty())
        throw ParseError(line, "invalid " + std::string(what) + " '" + std::string(field) + "'");
    return value;
}

/// Shortest round-trip decimal form.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

}  // namespace detail

/// Reads `id,x,y,load,alpha` rows (alpha optional, default 1.0).
inline std::vector<ExchangeSite> read_sites_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    int col_id = -1, col_x = -1, col_y = -1, col_load = -1, col_alpha = -1;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) break;
    }
    if (detail::trim(line).empty()) throw ParseError(0, "instance file is empty");
    const auto header = detail::split(line);
    columns = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto name = header[c];
        int* slot = name == "id" ? &col_id
                  : name == "x" ? &col_x
                  : name == "y" ? &col_y
                  : name == "load" ? &col_load
                  : name == "alpha" ? &col_alpha
                  : nullptr;
        if (!slot) throw ParseError(line_no, "unknown column '" + std::string(name) + "'");
        if (*slot >= 0) throw ParseError(line_no, "duplicate column '" + std::string(name) + "'");
        *slot = static_cast<int>(c);
    }
    if (col_id < 0 || col_x < 0 || col_y < 0 || col_load < 0)
        throw ParseError(line_no, "header must contain id,x,y,load");

    std::vector<ExchangeSite> sites;
    std::vector<std::size_t> lines;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split(line);
        if (fields.size() != columns)
            throw ParseError(line_no, "expected " + std::to_string(columns) + " fields, got " +
                                          std::to_string(fields.size()));
        ExchangeSite s;
        s.id = detail::parse_index(fields[col_id], line_no, "id");
        s.x = detail::parse_double(fields[col_x], line_no, "x");
        s.y = detail::parse_double(fields[col_y], line_no, "y");
        s.load = detail::parse_double(fields[col_load], line_no, "load");
        s.alpha = col_alpha >= 0 ? detail::parse_double(fields[col_alpha], line_no, "alpha") : 1.0;
        if (!std::isfinite(s.x) || !std::isfinite(s.y)) throw ParseError(line_no, "coordinates must be finite");
        if (!(s.load > 0.0) || !std::isfinite(s.load)) throw ParseError(line_no, "load must be positive");
        if (!(s.alpha > 0.0) || !std::isfinite(s.alpha)) throw ParseError(line_no, "alpha must be positive");
        sites.push_back(s);
        lines.push_back(line_no);
    }
    std::vector<std::size_t> order(sites.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return sites[a].id < sites[b].id; });
    std::vector<ExchangeSite> sorted;
    sorted.reserve(sites.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& s = sites[order[i]];
        if (s.id != i) throw ParseError(lines[order[i]], "site ids must be unique and contiguous from 0");
        sorted.push_back(s);
    }
    return sorted;
}

inline std::vector<ExchangeSite> read_sites_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return read_sites_csv(in);
    } catch (const ParseError& e) {
        throw e.in_source(path);
    }
}

inline void write_sites_csv(std::ostream& out, const std::vector<ExchangeSite>& sites) {
    out << "id,x,y,load,alpha\n";
    for (const auto& s : sites)
        out << s.id << ',' << detail::format_double(s.x) << ',' << detail::format_double(s.y) << ','
            << detail::format_double(s.load) << ',' << detail::format_double(s.alpha) << '\n';
}

/// Instance-level parameters from a sidecar JSON file.
struct InstanceParams {
    std::optional<std::size_t> k;
    std::optional<double> routing_factor;
};

inline InstanceParams parse_params_json(std::string_view text) {
    InstanceParams params;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, std::string("sidecar JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError(0, "sidecar JSON must be an object");
    if (doc.contains("k")) {
        if (!doc["k"].is_number_unsigned()) throw ParseError(0, "sidecar JSON: k must be a positive integer");
        params.k = doc["k"].get<std::size_t>();
    }
    if (doc.contains("routing_factor")) {
        if (!doc["routing_factor"].is_number()) throw ParseError(0, "sidecar JSON: routing_factor must be a number");
        params.routing_factor = doc["routing_factor"].get<double>();
    }
    return params;
}

inline InstanceParams read_params_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_params_json(buffer.str());
}

}  // namespace duocover
