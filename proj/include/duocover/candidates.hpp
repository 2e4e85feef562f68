#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "core.hpp"
#include "io.hpp"

namespace duocover {

enum class CandidateSource { CBS, KCN, FULL };

inline const char* to_string(CandidateSource source) {
    switch (source) {
        case CandidateSource::CBS: return "cbs";
        case CandidateSource::KCN: return "kcn";
        case CandidateSource::FULL: return "full";
    }
    return "?";
}

/// Per-site set of metro positions the site may be parented on.
class CandidateMap {
public:
    CandidateMap() = default;

    CandidateMap(std::size_t columns, std::vector<std::vector<SiteId>> pos, CandidateSource source)
        : columns_(columns), pos_(std::move(pos)), source_(source) {
        for (auto& row : pos_) {
            std::sort(row.begin(), row.end());
            row.erase(std::unique(row.begin(), row.end()), row.end());
            if (!row.empty() && row.back() >= columns_) throw ParameterError("candidate id out of range");
        }
    }

    static CandidateMap full(std::size_t rows, std::size_t columns) {
        std::vector<SiteId> all(columns);
        for (std::size_t j = 0; j < columns; ++j) all[j] = j;
        return CandidateMap(columns, std::vector<std::vector<SiteId>>(rows, all), CandidateSource::FULL);
    }

    static CandidateMap full(std::size_t n) { return full(n, n); }

    std::size_t rows() const { return pos_.size(); }
    std::size_t columns() const { return columns_; }
    CandidateSource source() const { return source_; }

    const std::vector<SiteId>& operator[](SiteId i) const { return pos_[i]; }
    const std::vector<std::vector<SiteId>>& sets() const { return pos_; }

    bool allows(SiteId i, SiteId j) const { return std::binary_search(pos_[i].begin(), pos_[i].end(), j); }

    std::size_t total_size() const {
        std::size_t total = 0;
        for (const auto& row : pos_) total += row.size();
        return total;
    }

    bool is_full() const {
        return std::all_of(pos_.begin(), pos_.end(), [&](const auto& row) { return row.size() == columns_; });
    }

    /// Adds `other`'s candidates to this map.
    void merge(const CandidateMap& other) {
        if (other.rows() != rows() || other.columns_ != columns_) throw ParameterError("candidate map shape mismatch");
        for (std::size_t i = 0; i < pos_.size(); ++i) {
            std::vector<SiteId> merged;
            std::set_union(pos_[i].begin(), pos_[i].end(), other.pos_[i].begin(), other.pos_[i].end(),
                           std::back_inserter(merged));
            pos_[i] = std::move(merged);
        }
    }

    friend bool operator==(const CandidateMap& a, const CandidateMap& b) {
        return a.columns_ == b.columns_ && a.pos_ == b.pos_;
    }

private:
    std::size_t columns_ = 0;
    std::vector<std::vector<SiteId>> pos_;
    CandidateSource source_ = CandidateSource::FULL;
};

inline void write_candidates_csv(std::ostream& out, const CandidateMap& map) {
    out << "site_id,candidate_id\n";
    for (std::size_t i = 0; i < map.rows(); ++i)
        for (SiteId j : map[i]) out << i << ',' << j << '\n';
}

/// Reads `site_id,candidate_id` pairs for an n-site instance.
inline CandidateMap read_candidates_csv(std::istream& in, std::size_t n,
                                        CandidateSource source = CandidateSource::CBS) {
    std::vector<std::vector<SiteId>> pos(n);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = detail::trim(line);
        if (text.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (text == "site_id,candidate_id") continue;
        }
        const auto fields = detail::split(text);
        if (fields.size() != 2) throw ParseError(line_no, "expected site_id,candidate_id");
        const auto i = detail::parse_index(fields[0], line_no, "site_id");
        const auto j = detail::parse_index(fields[1], line_no, "candidate_id");
        if (i >= n || j >= n) throw ParseError(line_no, "id out of range for " + std::to_string(n) + " sites");
        pos[i].push_back(j);
    }
    CandidateMap map(n, std::move(pos), source);
    return map.is_full() ? CandidateMap(n, map.sets(), CandidateSource::FULL) : map;
}

inline CandidateMap read_candidates_csv(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return read_candidates_csv(in, n);
    } catch (const ParseError& e) {
        throw e.in_source(path);
    }
}

}  // namespace duocover
