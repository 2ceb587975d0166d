#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "remo/error.hpp"
#include "remo/memory.hpp"
#include "remo/montgomery.hpp"
#include "remo/params.hpp"
#include "remo/rng.hpp"

namespace remo {

enum class FaultTarget { Alpha, Omega, Both, AddrJ, AddrK, AddrBoth };
enum class FaultMode { Random, Burst };

inline std::string_view to_string(FaultTarget t)
{
    switch (t) {
    case FaultTarget::Alpha: return "alpha";
    case FaultTarget::Omega: return "omega";
    case FaultTarget::Both: return "both";
    case FaultTarget::AddrJ: return "addr_j";
    case FaultTarget::AddrK: return "addr_k";
    case FaultTarget::AddrBoth: return "addr_both";
    }
    return "?";
}

inline std::string_view to_string(FaultMode m)
{
    return m == FaultMode::Random ? "random" : "burst";
}

inline FaultTarget parse_target(std::string_view s)
{
    for (auto t : {FaultTarget::Alpha, FaultTarget::Omega, FaultTarget::Both, FaultTarget::AddrJ,
                   FaultTarget::AddrK, FaultTarget::AddrBoth}) {
        if (s == to_string(t))
            return t;
    }
    throw Error(ErrorCode::ParseError, "unknown fault target '" + std::string(s) + "'");
}

inline FaultMode parse_mode(std::string_view s)
{
    if (s == "random")
        return FaultMode::Random;
    if (s == "burst")
        return FaultMode::Burst;
    throw Error(ErrorCode::ParseError, "unknown fault mode '" + std::string(s) + "'");
}

inline bool is_operand_target(FaultTarget t)
{
    return t == FaultTarget::Alpha || t == FaultTarget::Omega || t == FaultTarget::Both;
}

struct FaultSpec {
    FaultTarget target = FaultTarget::Alpha;
    FaultMode mode = FaultMode::Random;
    unsigned eta = 1;
    FaultPath path = FaultPath::Main;
    unsigned width = 1;

    void validate() const
    {
        if (width == 0 || width > 64)
            throw Error(ErrorCode::InvalidConfig, "field width must be in [1, 64]");
        if (eta == 0)
            throw Error(ErrorCode::InvalidConfig, "eta must be at least 1");
        if (eta > width)
            throw Error(ErrorCode::EtaTooLarge,
                        "eta = " + std::to_string(eta) + " exceeds width " + std::to_string(width));
        if (mode == FaultMode::Burst && eta < 2)
            throw Error(ErrorCode::InvalidConfig, "burst faults need eta >= 2");
    }
};

// ---------------------------------------------------------------------------
// Bit-flip primitives

/// Mask with exactly `eta` distinct bits among the low `width`, drawn without
/// replacement (partial Fisher-Yates over bit positions).
inline std::uint64_t random_mask(unsigned width, unsigned eta, TrialRng& rng)
{
    if (eta > width || width > 64)
        throw Error(ErrorCode::EtaTooLarge, "eta exceeds width");
    std::array<unsigned char, 64> pos{};
    for (unsigned b = 0; b < width; ++b)
        pos[b] = static_cast<unsigned char>(b);
    std::uint64_t mask = 0;
    for (unsigned t = 0; t < eta; ++t) {
        const auto pick = t + static_cast<unsigned>(rng.below(width - t));
        std::swap(pos[t], pos[pick]);
        mask |= std::uint64_t{1} << pos[t];
    }
    return mask;
}

inline std::uint64_t burst_mask(unsigned width, unsigned eta, unsigned start)
{
    if (eta > width)
        throw Error(ErrorCode::EtaTooLarge, "eta exceeds width");
    if (start > width - eta)
        throw Error(ErrorCode::InvalidConfig, "burst runs past the field");
    return low_mask(eta) << start;
}

inline std::uint64_t flip_random(std::uint64_t value, unsigned width, unsigned eta, TrialRng& rng)
{
    if (eta > width)
        throw Error(ErrorCode::EtaTooLarge, "eta exceeds width");
    if ((value & ~low_mask(width)) != 0)
        throw Error(ErrorCode::OperandTooWide, "value wider than the field");
    return value ^ random_mask(width, eta, rng);
}

inline std::uint64_t flip_burst(std::uint64_t value, unsigned width, unsigned eta, unsigned start)
{
    if ((value & ~low_mask(width)) != 0)
        throw Error(ErrorCode::OperandTooWide, "value wider than the field");
    return value ^ burst_mask(width, eta, start);
}

/// Draws the corruption mask for one injection; burst start is uniform.
inline std::uint64_t draw_mask(FaultMode mode, unsigned width, unsigned eta, TrialRng& rng)
{
    std::uint64_t mask;
    if (mode == FaultMode::Random) {
        mask = random_mask(width, eta, rng);
    } else {
        const auto start = static_cast<unsigned>(rng.below(width - eta + 1));
        mask = burst_mask(width, eta, start);
    }
    if (mask == 0)
        throw InvariantViolation("empty fault mask");
    return mask;
}

// ---------------------------------------------------------------------------
// Statistics

struct DetectionStats {
    double efficiency = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Efficiency and Wilson score 95% interval.
inline DetectionStats detection_stats(std::uint64_t detected, std::uint64_t injected)
{
    if (injected == 0)
        throw Error(ErrorCode::InvalidConfig, "no injected faults");
    if (detected > injected)
        throw Error(ErrorCode::InvalidConfig, "more detections than injections");
    const double n = static_cast<double>(injected);
    const double p = static_cast<double>(detected) / n;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    const double lo = detected == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = detected == injected ? 1.0 : std::min(1.0, centre + half);
    return {p, lo, hi};
}

// ---------------------------------------------------------------------------
// Campaign results

struct CellKey {
    unsigned w = 0; // 0 for memory cells
    unsigned eta = 0;
    FaultTarget target = FaultTarget::Alpha;
    FaultMode mode = FaultMode::Random;

    bool operator==(const CellKey&) const = default;

    std::uint64_t id() const noexcept
    {
        return (std::uint64_t{w} << 32) | (std::uint64_t{eta} << 16) |
               (static_cast<std::uint64_t>(target) << 8) | static_cast<std::uint64_t>(mode);
    }
};

struct CampaignCell {
    CellKey key;
    bool skipped = false; // grid position without a valid fault spec
    std::uint64_t samples = 0;
    std::uint64_t detected = 0;
    DetectionStats stats{};
    std::uint64_t seed = 0;

    bool operator==(const CampaignCell& o) const
    {
        return key == o.key && skipped == o.skipped && samples == o.samples && detected == o.detected &&
               seed == o.seed;
    }
};

struct CampaignResult {
    std::string kind; // "remo" or "memory"
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<CampaignCell> cells;

    const CampaignCell* find(const CellKey& key) const
    {
        for (const auto& c : cells) {
            if (c.key == key)
                return &c;
        }
        return nullptr;
    }
};

namespace detail {

inline unsigned effective_threads(unsigned requested, std::uint64_t trials)
{
    const unsigned t = std::max(1u, requested);
    return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(1, trials)));
}

/// Counts over trials [0, trials) split into contiguous chunks. `body` returns
/// {samples, detected} for one trial; summation order does not matter.
template <class Body>
std::pair<std::uint64_t, std::uint64_t> run_trials(std::uint64_t trials, unsigned threads, Body&& body)
{
    const unsigned nt = effective_threads(threads, trials);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> partial(nt, {0, 0});
    auto work = [&](unsigned t) {
        const std::uint64_t lo = trials * t / nt;
        const std::uint64_t hi = trials * (t + 1) / nt;
        for (std::uint64_t trial = lo; trial < hi; ++trial) {
            const auto [s, d] = body(trial);
            partial[t].first += s;
            partial[t].second += d;
        }
    };
    if (nt == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(nt);
        for (unsigned t = 0; t < nt; ++t)
            pool.emplace_back(work, t);
    }
    std::pair<std::uint64_t, std::uint64_t> total{0, 0};
    for (const auto& p : partial) {
        total.first += p.first;
        total.second += p.second;
    }
    return total;
}

inline CampaignCell finish_cell(const CellKey& key, std::uint64_t seed, std::uint64_t samples,
                                std::uint64_t detected)
{
    CampaignCell c{key, false, samples, detected, {}, seed};
    c.stats = detection_stats(detected, samples);
    return c;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Operand (REMO) campaign

struct RemoCampaignConfig {
    std::vector<unsigned> ws{2, 4, 8};
    std::vector<unsigned> etas{1, 3, 5, 11, 17, 23};
    std::vector<FaultTarget> targets{FaultTarget::Alpha, FaultTarget::Omega, FaultTarget::Both};
    std::vector<FaultMode> modes{FaultMode::Random, FaultMode::Burst};
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    std::uint64_t q = 3329;
    unsigned l = 24;
    std::uint64_t n = 256;
    std::uint64_t K = 1;
    Comparator comparator = Comparator::ModQ;
    FaultPath path = FaultPath::Main;
    unsigned threads = 1;

    void validate() const
    {
        if (ws.empty() || etas.empty() || targets.empty() || modes.empty())
            throw Error(ErrorCode::InvalidConfig, "campaign grid is empty");
        if (samples == 0)
            throw Error(ErrorCode::InvalidConfig, "samples must be at least 1");
        for (auto t : targets) {
            if (!is_operand_target(t))
                throw Error(ErrorCode::InvalidConfig,
                            "target " + std::string(to_string(t)) + " is not an operand target");
        }
        for (auto e : etas) {
            if (e == 0)
                throw Error(ErrorCode::InvalidConfig, "eta must be at least 1");
            if (e > l)
                throw Error(ErrorCode::EtaTooLarge, "eta exceeds operand width l");
        }
        for (auto w : ws)
            derive(q, l, w, n);
    }
};

inline std::string_view to_string(Comparator c)
{
    switch (c) {
    case Comparator::ModQ: return "modq";
    case Comparator::Bitwise: return "bitwise";
    case Comparator::Offset: return "offset";
    }
    return "?";
}

inline Comparator parse_comparator(std::string_view s)
{
    if (s == "modq")
        return Comparator::ModQ;
    if (s == "bitwise")
        return Comparator::Bitwise;
    if (s == "offset")
        return Comparator::Offset;
    throw Error(ErrorCode::ParseError, "unknown comparator '" + std::string(s) + "'");
}

inline std::string_view to_string(FaultPath p)
{
    switch (p) {
    case FaultPath::Main: return "main";
    case FaultPath::Shadow: return "shadow";
    case FaultPath::Both: return "both";
    }
    return "?";
}

inline FaultPath parse_path(std::string_view s)
{
    if (s == "main")
        return FaultPath::Main;
    if (s == "shadow")
        return FaultPath::Shadow;
    if (s == "both")
        return FaultPath::Both;
    throw Error(ErrorCode::ParseError, "unknown fault path '" + std::string(s) + "'");
}

/// One REMO cell. eta = 0 runs the fault-free control arm through the same
/// pipeline (operands drawn, no corruption).
inline CampaignCell run_remo_cell(const RemoCampaignConfig& cfg, const CellKey& key)
{
    const ParamSet ps = derive(cfg.q, cfg.l, key.w, cfg.n);
    if (key.eta != 0)
        FaultSpec{key.target, key.mode, key.eta, cfg.path, cfg.l}.validate();
    const std::uint64_t cell_id = key.id();
    const bool hit_alpha = key.target == FaultTarget::Alpha || key.target == FaultTarget::Both;
    const bool hit_beta = key.target == FaultTarget::Omega || key.target == FaultTarget::Both;

    auto [samples, detected] = detail::run_trials(cfg.samples, cfg.threads, [&](std::uint64_t trial) {
        TrialRng rng(derive_seed(cfg.seed, cell_id, trial));
        const std::uint64_t alpha = rng.below(cfg.q);
        const std::uint64_t beta = rng.below(cfg.q);
        MmrfdOptions opts{{cfg.K}, cfg.comparator, std::nullopt};
        if (key.eta != 0) {
            OperandFault f{cfg.path, 0, 0, 0};
            if (hit_alpha)
                f.alpha_xor = draw_mask(key.mode, cfg.l, key.eta, rng);
            if (hit_beta)
                f.beta_xor = draw_mask(key.mode, cfg.l, key.eta, rng);
            if ((alpha ^ f.alpha_xor) == alpha && (beta ^ f.beta_xor) == beta)
                throw InvariantViolation("injected fault left the operands unchanged");
            opts.fault = f;
        }
        const auto out = mmrfd_outcome(alpha, beta, ps, opts);
        return std::pair<std::uint64_t, std::uint64_t>{1, out.fault_any ? 1 : 0};
    });
    return detail::finish_cell(key, cfg.seed, samples, detected);
}

inline CampaignResult run_remo_campaign(const RemoCampaignConfig& cfg)
{
    cfg.validate();
    CampaignResult res;
    res.kind = "remo";
    res.metadata = {
        {"campaign", "remo"},
        {"seed", std::to_string(cfg.seed)},
        {"comparator", std::string(to_string(cfg.comparator))},
        {"q", std::to_string(cfg.q)},
        {"l", std::to_string(cfg.l)},
        {"K", std::to_string(cfg.K)},
        {"fault_path", std::string(to_string(cfg.path))},
        {"operands", "uniform in [0, q)"},
        {"samples_per_cell", std::to_string(cfg.samples)},
    };
    for (auto w : cfg.ws)
        for (auto eta : cfg.etas)
            for (auto target : cfg.targets)
                for (auto mode : cfg.modes) {
                    const CellKey key{w, eta, target, mode};
                    if (mode == FaultMode::Burst && eta < 2) {
                        res.cells.push_back({key, true, 0, 0, {}, cfg.seed});
                        continue;
                    }
                    res.cells.push_back(run_remo_cell(cfg, key));
                }
    return res;
}

// ---------------------------------------------------------------------------
// Address (memory rule checker) campaign

enum class RuleKind { StageAligned, Literal };

inline std::string_view to_string(RuleKind r)
{
    return r == RuleKind::StageAligned ? "stage" : "literal";
}

inline RuleKind parse_rule(std::string_view s)
{
    if (s == "stage")
        return RuleKind::StageAligned;
    if (s == "literal")
        return RuleKind::Literal;
    throw Error(ErrorCode::ParseError, "unknown i-k rule '" + std::string(s) + "'");
}

inline RuleSchedule make_rule(RuleKind kind, std::uint64_t n)
{
    return kind == RuleKind::StageAligned ? RuleSchedule::stage_aligned(n) : RuleSchedule::literal(n);
}

struct MemoryCampaignConfig {
    KyberVariant variant = KyberVariant::Kyber768;
    std::vector<unsigned> etas{1, 2, 3, 4, 5, 6, 7};
    std::vector<FaultTarget> targets{FaultTarget::AddrBoth, FaultTarget::AddrJ, FaultTarget::AddrK};
    std::vector<FaultMode> modes{FaultMode::Random, FaultMode::Burst};
    std::uint64_t runs = 100;
    std::uint64_t seed = 0;
    RuleKind rule = RuleKind::StageAligned;
    unsigned threads = 1;

    void validate() const
    {
        if (etas.empty() || targets.empty() || modes.empty())
            throw Error(ErrorCode::InvalidConfig, "campaign grid is empty");
        if (runs == 0)
            throw Error(ErrorCode::InvalidConfig, "runs must be at least 1");
        const auto sched = kyber_flow(variant);
        const unsigned width = std::min(j_field_width(sched.n), k_field_width(sched.n));
        for (auto t : targets) {
            if (is_operand_target(t))
                throw Error(ErrorCode::InvalidConfig,
                            "target " + std::string(to_string(t)) + " is not an address target");
        }
        for (auto e : etas) {
            if (e == 0)
                throw Error(ErrorCode::InvalidConfig, "eta must be at least 1");
            if (e > width)
                throw Error(ErrorCode::EtaTooLarge, "eta exceeds index field width");
        }
    }
};

/// One address cell. Each run replays the whole flow and injects into every
/// access of the targeted kind, so a cell holds runs x accesses trials:
///   addr_j    every ROM read: j ^= mask, detected by the i-j rule
///   addr_k    every RAM hit:  k ^= mask, detected by the i-k rule
///   addr_both every butterfly: j and k of the same butterfly with
///             independent masks, detected if either rule fires
inline CampaignCell run_memory_cell(const MemoryCampaignConfig& cfg, const CellKey& key)
{
    const auto sched = kyber_flow(cfg.variant);
    const RuleSchedule rule = make_rule(cfg.rule, sched.n);
    const unsigned jw = j_field_width(sched.n);
    const unsigned kw = k_field_width(sched.n);
    FaultSpec{key.target, key.mode, key.eta, FaultPath::Main, std::min(jw, kw)}.validate();
    const std::uint64_t cell_id = key.id();

    auto [samples, detected] = detail::run_trials(cfg.runs, cfg.threads, [&](std::uint64_t run) {
        TrialRng rng(derive_seed(cfg.seed, cell_id, run));
        std::uint64_t s = 0, d = 0;
        bool j_fired = false;
        for_each_flow_access(sched, [&](const AccessEvent& e) {
            if (e.kind == AccessKind::Rom) {
                if (key.target == FaultTarget::AddrK)
                    return;
                const std::uint64_t mask = draw_mask(key.mode, jw, key.eta, rng);
                j_fired = ij_check(e.i, e.j ^ mask) == Verdict::Violation;
                if (key.target == FaultTarget::AddrJ) {
                    ++s;
                    d += j_fired ? 1 : 0;
                }
                return;
            }
            if (key.target == FaultTarget::AddrJ)
                return;
            if (key.target == FaultTarget::AddrBoth && e.op != AccessOp::Read)
                return;
            const std::uint64_t mask = draw_mask(key.mode, kw, key.eta, rng);
            const bool k_fired = ik_check(e.k ^ mask, rule_state(rule, e.local)) == Verdict::Violation;
            ++s;
            if (key.target == FaultTarget::AddrBoth)
                d += (j_fired || k_fired) ? 1 : 0;
            else
                d += k_fired ? 1 : 0;
        });
        return std::pair<std::uint64_t, std::uint64_t>{s, d};
    });
    return detail::finish_cell(key, cfg.seed, samples, detected);
}

inline CampaignResult run_memory_campaign(const MemoryCampaignConfig& cfg)
{
    cfg.validate();
    const auto sched = kyber_flow(cfg.variant);
    CampaignResult res;
    res.kind = "memory";
    res.metadata = {
        {"campaign", "memory"},
        {"seed", std::to_string(cfg.seed)},
        {"variant", std::string(to_string(cfg.variant))},
        {"runs_per_cell", std::to_string(cfg.runs)},
        {"ik_rule", std::string(to_string(cfg.rule))},
        {"j_width", std::to_string(j_field_width(sched.n))},
        {"k_width", std::to_string(k_field_width(sched.n))},
        {"addr_both", "j and k of the same butterfly, independent masks, detected if either rule fires"},
    };
    for (auto eta : cfg.etas)
        for (auto target : cfg.targets)
            for (auto mode : cfg.modes) {
                const CellKey key{0, eta, target, mode};
                if (mode == FaultMode::Burst && eta < 2) {
                    res.cells.push_back({key, true, 0, 0, {}, cfg.seed});
                    continue;
                }
                res.cells.push_back(run_memory_cell(cfg, key));
            }
    return res;
}

} // namespace remo
