#pragma once

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "remo/faults.hpp"

namespace remo {

// Campaign exports. CSV column order is fixed:
//   w,eta,target,mode,samples,detected,efficiency_pct,ci_lo,ci_hi,seed
// Metadata precedes the header as "# key: value" lines. Percentages carry
// four decimals; skipped grid positions leave the count columns empty.

inline constexpr const char* kCampaignCsvHeader =
    "w,eta,target,mode,samples,detected,efficiency_pct,ci_lo,ci_hi,seed";

inline std::string format_pct(double fraction, int decimals = 4)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, fraction * 100.0);
    return buf;
}

inline void write_campaign_csv(std::ostream& os, const CampaignResult& res)
{
    for (const auto& [k, v] : res.metadata)
        os << "# " << k << ": " << v << '\n';
    os << kCampaignCsvHeader << '\n';
    for (const auto& c : res.cells) {
        if (c.key.w != 0)
            os << c.key.w;
        os << ',' << c.key.eta << ',' << to_string(c.key.target) << ',' << to_string(c.key.mode) << ',';
        if (c.skipped)
            os << ",,,,";
        else
            os << c.samples << ',' << c.detected << ',' << format_pct(c.stats.efficiency) << ','
               << format_pct(c.stats.ci_lo) << ',' << format_pct(c.stats.ci_hi);
        os << ',' << c.seed << '\n';
    }
}

inline std::string campaign_csv(const CampaignResult& res)
{
    std::ostringstream os;
    write_campaign_csv(os, res);
    return os.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

inline std::uint64_t parse_u64(const std::string& s)
{
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "expected an unsigned integer, got '" + s + "'");
    }
    if (used != s.size())
        throw Error(ErrorCode::ParseError, "trailing characters in '" + s + "'");
    return v;
}

} // namespace detail

/// Reads a campaign CSV back; statistics are recomputed from the counts.
inline CampaignResult parse_campaign_csv(std::istream& is)
{
    CampaignResult res;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        if (line.rfind("# ", 0) == 0) {
            const auto colon = line.find(": ");
            if (colon == std::string::npos)
                throw Error(ErrorCode::ParseError, "bad metadata line: " + line);
            res.metadata.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
            if (line.substr(2, colon - 2) == "campaign")
                res.kind = line.substr(colon + 2);
            continue;
        }
        if (!header_seen) {
            if (line != kCampaignCsvHeader)
                throw Error(ErrorCode::ParseError, "unexpected header: " + line);
            header_seen = true;
            continue;
        }
        const auto f = detail::split_csv_line(line);
        if (f.size() != 10)
            throw Error(ErrorCode::ParseError, "expected 10 columns: " + line);
        CampaignCell c;
        c.key.w = f[0].empty() ? 0 : static_cast<unsigned>(detail::parse_u64(f[0]));
        c.key.eta = static_cast<unsigned>(detail::parse_u64(f[1]));
        c.key.target = parse_target(f[2]);
        c.key.mode = parse_mode(f[3]);
        c.seed = detail::parse_u64(f[9]);
        if (f[4].empty()) {
            c.skipped = true;
        } else {
            c.samples = detail::parse_u64(f[4]);
            c.detected = detail::parse_u64(f[5]);
            c.stats = detection_stats(c.detected, c.samples);
        }
        res.cells.push_back(c);
    }
    if (!header_seen)
        throw Error(ErrorCode::ParseError, "missing CSV header");
    return res;
}

inline nlohmann::json campaign_json(const CampaignResult& res)
{
    nlohmann::json meta = nlohmann::json::object();
    for (const auto& [k, v] : res.metadata)
        meta[k] = v;
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : res.cells) {
        nlohmann::json j = {
            {"w", c.key.w == 0 ? nlohmann::json(nullptr) : nlohmann::json(c.key.w)},
            {"eta", c.key.eta},
            {"target", to_string(c.key.target)},
            {"mode", to_string(c.key.mode)},
            {"seed", c.seed},
        };
        if (c.skipped) {
            j["skipped"] = true;
        } else {
            j["samples"] = c.samples;
            j["detected"] = c.detected;
            j["efficiency_pct"] = c.stats.efficiency * 100.0;
            j["ci_lo"] = c.stats.ci_lo * 100.0;
            j["ci_hi"] = c.stats.ci_hi * 100.0;
        }
        cells.push_back(std::move(j));
    }
    return {{"metadata", meta}, {"cells", cells}};
}

/// Markdown table: one row per (w, eta) or per eta, one column per
/// (target, mode) in grid order; skipped cells print "-".
inline void write_campaign_markdown(std::ostream& os, const CampaignResult& res)
{
    std::vector<std::pair<FaultTarget, FaultMode>> columns;
    std::vector<std::pair<unsigned, unsigned>> rows;
    for (const auto& c : res.cells) {
        const std::pair col{c.key.target, c.key.mode};
        if (std::find(columns.begin(), columns.end(), col) == columns.end())
            columns.push_back(col);
        const std::pair row{c.key.w, c.key.eta};
        if (std::find(rows.begin(), rows.end(), row) == rows.end())
            rows.push_back(row);
    }
    const bool has_w = res.kind == "remo";
    for (const auto& [k, v] : res.metadata)
        os << "<!-- " << k << ": " << v << " -->\n";
    os << '|';
    if (has_w)
        os << " w |";
    os << " eta |";
    for (const auto& [t, m] : columns)
        os << ' ' << to_string(t) << ' ' << to_string(m) << " |";
    os << "\n|";
    for (std::size_t i = 0; i < columns.size() + (has_w ? 2 : 1); ++i)
        os << "---|";
    os << '\n';
    for (const auto& [w, eta] : rows) {
        os << '|';
        if (has_w)
            os << ' ' << w << " |";
        os << ' ' << eta << " |";
        for (const auto& [t, m] : columns) {
            const auto* c = res.find({w, eta, t, m});
            if (c == nullptr || c->skipped)
                os << " - |";
            else
                os << ' ' << format_pct(c->stats.efficiency, 2) << " |";
        }
        os << '\n';
    }
}

} // namespace remo
