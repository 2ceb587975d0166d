#pragma once

#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "remo/error.hpp"
#include "remo/montgomery.hpp"
#include "remo/ntt.hpp"

namespace remo {

// One row per iteration, fields in record order, followed by the bit-widths
// of both accumulators. Values are decimal; 128-bit registers print in full.

inline void write_trace_csv(std::ostream& os, const MontTrace& trace)
{
    os << "i,aw,mu,gamma,aw_f,mu_f,gamma_f,flag,gamma_bits,gamma_f_bits\n";
    for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
        const auto& r = trace.iterations[i];
        os << i << ',' << to_decimal(r.aw) << ',' << to_decimal(r.mu) << ',' << to_decimal(r.gamma) << ','
           << to_decimal(r.aw_f) << ',' << to_decimal(r.mu_f) << ',' << to_decimal(r.gamma_f) << ','
           << (r.flag ? 1 : 0) << ',' << bit_width(r.gamma) << ',' << bit_width(r.gamma_f) << '\n';
    }
}

inline nlohmann::json trace_json(const MontTrace& trace, const ParamSet& ps)
{
    nlohmann::json iters = nlohmann::json::array();
    for (const auto& r : trace.iterations) {
        iters.push_back({
            {"aw", to_decimal(r.aw)},
            {"mu", to_decimal(r.mu)},
            {"gamma", to_decimal(r.gamma)},
            {"aw_f", to_decimal(r.aw_f)},
            {"mu_f", to_decimal(r.mu_f)},
            {"gamma_f", to_decimal(r.gamma_f)},
            {"flag", r.flag},
            {"gamma_bits", bit_width(r.gamma)},
            {"gamma_f_bits", bit_width(r.gamma_f)},
        });
    }
    return {
        {"params", {{"q", ps.q}, {"l", ps.l}, {"w", ps.w}, {"p", ps.p}, {"words", ps.words},
                    {"R", to_decimal(ps.R)}, {"q_prime", ps.q_prime}}},
        {"iterations", iters},
        {"final", {{"result", trace.result}, {"gamma", to_decimal(trace.gamma)},
                   {"gamma_f", to_decimal(trace.gamma_f)}, {"fault_any", trace.fault_any}}},
    };
}

// Polynomials: newline-separated decimal residues, or a JSON array.

inline Poly parse_poly(std::string_view text)
{
    Poly p;
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '[') {
        try {
            const auto j = nlohmann::json::parse(text);
            p.coeffs = j.get<std::vector<std::uint64_t>>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, e.what());
        }
        return p;
    }
    std::istringstream is{std::string(text)};
    std::string line;
    while (std::getline(is, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            continue;
        const auto e = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(b, e - b + 1);
        std::size_t used = 0;
        try {
            p.coeffs.push_back(std::stoull(tok, &used));
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            throw Error(ErrorCode::ParseError, "not a decimal residue: '" + tok + "'");
    }
    return p;
}

inline std::string poly_text(const Poly& p)
{
    std::ostringstream os;
    for (auto c : p.coeffs)
        os << c << '\n';
    return os.str();
}

inline std::string poly_json(const Poly& p)
{
    return nlohmann::json(p.coeffs).dump();
}

} // namespace remo
