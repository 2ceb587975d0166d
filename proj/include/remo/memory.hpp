#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "remo/error.hpp"

namespace remo {

// Address model of the transform memories. Stage i (0-based) runs n/2
// butterflies; j in [0, 2^i) selects the twiddle (ROM) and k in
// [0, n / 2^(i+1)) selects the butterfly group, so the coefficient pair lives
// at RAM addresses k*2^(i+1) + j and k*2^(i+1) + j + 2^i.

inline unsigned log2_exact(std::uint64_t n)
{
    if (n < 2 || (n & (n - 1)) != 0)
        throw Error(ErrorCode::BadTransformSize, "n = " + std::to_string(n) + " is not a power of two");
    unsigned lg = 0;
    while ((std::uint64_t{1} << lg) != n)
        ++lg;
    return lg;
}

inline std::uint64_t butterflies_per_transform(std::uint64_t n)
{
    return n / 2 * log2_exact(n);
}

/// Bit-widths of the j and k index fields for transform size n.
inline unsigned j_field_width(std::uint64_t n) { return log2_exact(n) - 1; }
inline unsigned k_field_width(std::uint64_t n) { return log2_exact(n) - 1; }

struct IjkTuple {
    unsigned i = 0;
    std::uint64_t j = 0;
    std::uint64_t k = 0;
    std::uint64_t iteration = 0;
};

/// Visits the index stream of one transform: stage-major, then j, then k.
template <class F>
void for_each_ijk(std::uint64_t n, F&& visit)
{
    const unsigned stages = log2_exact(n);
    std::uint64_t iteration = 0;
    for (unsigned i = 0; i < stages; ++i) {
        const std::uint64_t half = std::uint64_t{1} << i;
        const std::uint64_t groups = n >> (i + 1);
        for (std::uint64_t j = 0; j < half; ++j)
            for (std::uint64_t k = 0; k < groups; ++k)
                visit(IjkTuple{i, j, k, iteration++});
    }
}

inline std::vector<IjkTuple> ijk_gen(std::uint64_t n)
{
    std::vector<IjkTuple> out;
    out.reserve(butterflies_per_transform(n));
    for_each_ijk(n, [&](const IjkTuple& t) { out.push_back(t); });
    return out;
}

struct RamPair {
    std::uint64_t upper;
    std::uint64_t lower;
};

inline RamPair ram_addresses(const IjkTuple& t)
{
    const std::uint64_t base = (t.k << (t.i + 1)) + t.j;
    return {base, base + (std::uint64_t{1} << t.i)};
}

/// ROM holds omega^e for e in [0, n/2); stage i reads exponent j * n / 2^(i+1).
inline std::uint64_t rom_address(const IjkTuple& t, std::uint64_t n)
{
    return t.j * (n >> (t.i + 1));
}

// ---------------------------------------------------------------------------
// Rule checkers

/// Bound schedule for the i-k rule: s = init >> floor(iteration / shift_period).
struct RuleSchedule {
    std::uint64_t init = 0;
    std::uint64_t shift_period = 1;

    /// One shift per stage starting from the largest group index. Tight for
    /// every transform size.
    static RuleSchedule stage_aligned(std::uint64_t n) { return {n / 2 - 1, n / 2}; }

    /// s starts at n-1 and shifts every 256 butterflies. Compliant for n <= 256.
    static RuleSchedule literal(std::uint64_t n) { return {n - 1, 256}; }
};

struct RuleState {
    std::uint64_t s = 0;
    std::uint64_t shift_period = 1;
};

inline RuleState rule_state(const RuleSchedule& sched, std::uint64_t iteration)
{
    if (sched.shift_period == 0)
        throw Error(ErrorCode::InvalidConfig, "shift period must be positive");
    const std::uint64_t shifts = iteration / sched.shift_period;
    return {shifts >= 64 ? 0 : sched.init >> shifts, sched.shift_period};
}

enum class Verdict { Ok, Violation };

/// RAM-side rule: k <= s. A violation raises the ram fault signal.
inline Verdict ik_check(std::uint64_t k, const RuleState& state)
{
    return k <= state.s ? Verdict::Ok : Verdict::Violation;
}

/// ROM-side rule: j <= 2^i - 1. A violation raises the rom fault signal.
inline Verdict ij_check(unsigned i, std::uint64_t j)
{
    if (i >= 64)
        return Verdict::Ok;
    return j <= (std::uint64_t{1} << i) - 1 ? Verdict::Ok : Verdict::Violation;
}

// ---------------------------------------------------------------------------
// Access events

enum class AccessKind { Ram, Rom };
enum class AccessOp { Read, Write };

inline constexpr unsigned kNoRam = ~0u;

struct AccessEvent {
    AccessKind kind = AccessKind::Ram;
    unsigned ram_id = kNoRam;
    unsigned i = 0;
    std::uint64_t j = 0;
    std::uint64_t k = 0;
    std::uint64_t iteration = 0; // butterfly counter across the whole run
    std::uint64_t local = 0;     // butterfly counter within the transform
    AccessOp op = AccessOp::Read;
};

/// Events of one transform: per butterfly a ROM twiddle read, then a RAM read
/// and a RAM write of the coefficient pair.
template <class F>
void for_each_access_of(const IjkTuple& t, unsigned ram_id, F&& visit, std::uint64_t iteration_base = 0)
{
    const std::uint64_t it = iteration_base + t.iteration;
    visit(AccessEvent{AccessKind::Rom, kNoRam, t.i, t.j, t.k, it, t.iteration, AccessOp::Read});
    visit(AccessEvent{AccessKind::Ram, ram_id, t.i, t.j, t.k, it, t.iteration, AccessOp::Read});
    visit(AccessEvent{AccessKind::Ram, ram_id, t.i, t.j, t.k, it, t.iteration, AccessOp::Write});
}

template <class F>
void for_each_access(std::uint64_t n, unsigned ram_id, std::uint64_t iteration_base, F&& visit)
{
    for_each_ijk(n, [&](const IjkTuple& t) { for_each_access_of(t, ram_id, visit, iteration_base); });
}

inline void write_access_csv_header(std::ostream& os)
{
    os << "iteration,kind,ram_id,i,j,k,op\n";
}

inline void write_access_csv_row(std::ostream& os, const AccessEvent& e)
{
    os << e.iteration << ',' << (e.kind == AccessKind::Ram ? "RAM" : "ROM") << ',';
    if (e.ram_id != kNoRam)
        os << e.ram_id;
    os << ',' << e.i << ',' << e.j << ',' << e.k << ','
       << (e.op == AccessOp::Read ? "read" : "write") << '\n';
}

// ---------------------------------------------------------------------------
// Kyber memory traffic

enum class KyberVariant { Kyber512, Kyber768, Kyber1024 };
enum class Phase { KeyGen, Encap, Decap };
enum class TransformKind { Ntt, Intt };

inline KyberVariant parse_variant(std::string_view name)
{
    if (name == "kyber512")
        return KyberVariant::Kyber512;
    if (name == "kyber768")
        return KyberVariant::Kyber768;
    if (name == "kyber1024")
        return KyberVariant::Kyber1024;
    throw Error(ErrorCode::UnknownVariant, std::string(name));
}

inline std::string_view to_string(KyberVariant v)
{
    switch (v) {
    case KyberVariant::Kyber512: return "kyber512";
    case KyberVariant::Kyber768: return "kyber768";
    case KyberVariant::Kyber1024: return "kyber1024";
    }
    return "?";
}

inline std::string_view to_string(Phase p)
{
    switch (p) {
    case Phase::KeyGen: return "KeyGen";
    case Phase::Encap: return "Encap";
    case Phase::Decap: return "Decap";
    }
    return "?";
}

inline unsigned module_rank(KyberVariant v)
{
    switch (v) {
    case KyberVariant::Kyber512: return 2;
    case KyberVariant::Kyber768: return 3;
    case KyberVariant::Kyber1024: return 4;
    }
    return 0;
}

struct FlowCall {
    Phase phase;
    TransformKind kind;
    std::string label;
    unsigned ram_id;
};

/// Ten RAMs, one per polynomial; t-hat (id 9) is never transformed.
inline constexpr std::string_view kRamNames[10] = {
    "s", "e", "r", "At.r", "tt.r", "u", "u^", "u^s", "t^r", "t^",
};

struct FlowSchedule {
    KyberVariant variant;
    std::uint64_t n = 256;
    std::vector<FlowCall> calls;
};

inline FlowSchedule kyber_flow(KyberVariant variant)
{
    const unsigned rank = module_rank(variant);
    FlowSchedule sched{variant, 256, {}};
    auto add = [&](Phase ph, TransformKind kind, const char* label, unsigned ram, unsigned times) {
        for (unsigned t = 0; t < times; ++t)
            sched.calls.push_back({ph, kind, label, ram});
    };
    add(Phase::KeyGen, TransformKind::Ntt, "NTT(s)", 0, rank);
    add(Phase::KeyGen, TransformKind::Ntt, "NTT(e)", 1, rank);
    add(Phase::Encap, TransformKind::Ntt, "NTT(r)", 2, rank);
    add(Phase::Encap, TransformKind::Intt, "INTT(At.r)", 3, rank);
    add(Phase::Encap, TransformKind::Intt, "INTT(tt.r)", 4, 1);
    add(Phase::Decap, TransformKind::Ntt, "NTT(r)", 2, rank);
    add(Phase::Decap, TransformKind::Ntt, "NTT(u)", 5, rank);
    add(Phase::Decap, TransformKind::Intt, "INTT(u^)", 6, rank);
    add(Phase::Decap, TransformKind::Intt, "INTT(u^s)", 7, 1);
    add(Phase::Decap, TransformKind::Intt, "INTT(t^r)", 8, 1);
    return sched;
}

inline FlowSchedule kyber_flow(std::string_view variant)
{
    return kyber_flow(parse_variant(variant));
}

/// Replays every call of the schedule through the access generator.
template <class F>
void for_each_flow_access(const FlowSchedule& sched, F&& visit)
{
    const std::uint64_t per_call = butterflies_per_transform(sched.n);
    std::uint64_t base = 0;
    for (const auto& call : sched.calls) {
        for_each_access(sched.n, call.ram_id, base, visit);
        base += per_call;
    }
}

struct HitRow {
    Phase phase;
    std::string label;
    std::uint64_t calls = 0;
    std::uint64_t ram_hits = 0;
    std::uint64_t rom_hits = 0;
};

struct HitCounts {
    std::uint64_t calls = 0;
    std::uint64_t ram_hits = 0;
    std::uint64_t rom_hits = 0;
    std::vector<HitRow> rows; // one per (phase, label), in schedule order
};

inline HitCounts count_hits(const FlowSchedule& sched)
{
    HitCounts out;
    for (const auto& call : sched.calls) {
        if (out.rows.empty() || out.rows.back().phase != call.phase || out.rows.back().label != call.label)
            out.rows.push_back({call.phase, call.label, 0, 0, 0});
        auto& row = out.rows.back();
        ++row.calls;
        for_each_access(sched.n, call.ram_id, 0, [&](const AccessEvent& e) {
            (e.kind == AccessKind::Ram ? row.ram_hits : row.rom_hits)++;
        });
    }
    for (const auto& row : out.rows) {
        out.calls += row.calls;
        out.ram_hits += row.ram_hits;
        out.rom_hits += row.rom_hits;
    }
    return out;
}

struct RuleReport {
    std::uint64_t checked = 0;
    std::uint64_t ram_violations = 0;
    std::uint64_t rom_violations = 0;
};

/// Runs both checkers over every access of the schedule.
inline RuleReport check_flow(const FlowSchedule& sched, const RuleSchedule& rule)
{
    RuleReport rep;
    for_each_flow_access(sched, [&](const AccessEvent& e) {
        ++rep.checked;
        if (e.kind == AccessKind::Rom) {
            if (ij_check(e.i, e.j) == Verdict::Violation)
                ++rep.rom_violations;
        } else if (ik_check(e.k, rule_state(rule, e.local)) == Verdict::Violation) {
            ++rep.ram_violations;
        }
    });
    return rep;
}

} // namespace remo
