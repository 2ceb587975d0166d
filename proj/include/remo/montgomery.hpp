#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/integer/mod_inverse.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "remo/error.hpp"
#include "remo/params.hpp"
#include "remo/wide_int.hpp"

namespace remo {

// Word-wise Montgomery multiplication with a recomputed shadow path
// (REMO: recomputation with a modular offset). The main path consumes the
// words aw_i of the padded multiplicand; the shadow path consumes
// aw_i + K*q. Both accumulators stay congruent mod q when fault free, so a
// mismatch in residue at any iteration raises the fault flag.

enum class Comparator {
    ModQ,    // flag iff gamma != gamma_f (mod q)
    Bitwise, // flag iff gamma != gamma_f as integers
    Offset,  // flag iff gamma_f != gamma + q * K * (beta >> w)
};

enum class FaultPath { Main, Shadow, Both };

struct EncoderConfig {
    std::uint64_t K = 1;
};

/// XOR corruption of one path's operand views, active from `first_iteration` on.
struct OperandFault {
    FaultPath path = FaultPath::Main;
    std::uint64_t alpha_xor = 0;
    std::uint64_t beta_xor = 0;
    unsigned first_iteration = 0;
};

struct MmrfdOptions {
    EncoderConfig encoder{};
    Comparator comparator = Comparator::ModQ;
    std::optional<OperandFault> fault{};
};

struct PaddedOperands {
    std::uint64_t alpha = 0;
    std::uint64_t beta = 0;
    unsigned bits = 0;
};

/// Zero-extends both operands to the padded width. Values are unchanged.
inline PaddedOperands pad_operands(std::uint64_t alpha, std::uint64_t beta, const ParamSet& ps)
{
    const std::uint64_t limit = ps.operand_limit();
    if (alpha >= limit || beta >= limit)
        throw Error(ErrorCode::OperandTooWide,
                    "operand exceeds " + std::to_string(ps.l) + " bits");
    return {alpha, beta, ps.p != 0 ? ps.l + ps.pad_bits : ps.l};
}

template <class Int>
struct MontState {
    Int gamma{0};
    Int mu{0};
    unsigned iteration = 0;
};

namespace detail {

// gamma <- (gamma + aw*beta + mu*q) / 2^w with mu chosen from the low words
// so the division is exact.
template <class Int>
MontState<Int> montgomery_word_step(const MontState<Int>& state, const Int& aw, const Int& beta,
                                    const ParamSet& ps)
{
    const Int mask{ps.word_mask()};
    const Int q{ps.q};
    const Int low_gamma = state.gamma & mask;
    const Int low_beta = beta & mask;
    const Int mu = ((low_gamma + aw * low_beta) * Int{ps.q_prime}) & mask;
    const Int numerator = state.gamma + aw * beta + mu * q;
    if ((numerator & mask) != 0)
        throw InvariantViolation("montgomery step: numerator not divisible by 2^w");
    return {Int{numerator >> ps.w}, mu, state.iteration + 1};
}

} // namespace detail

template <class Int>
MontState<Int> gamma_step(const MontState<Int>& state, const Int& aw, const Int& beta,
                          const ParamSet& ps)
{
    if (aw > Int{ps.word_mask()})
        throw Error(ErrorCode::OperandTooWide, "word wider than w bits");
    return detail::montgomery_word_step(state, aw, beta, ps);
}

template <class Int>
Int encode_word(const Int& aw, std::uint64_t K, std::uint64_t q)
{
    return aw + Int{K} * Int{q};
}

/// Same recurrence as gamma_step, applied to the shadow accumulator; the
/// encoded word is wider than w bits.
template <class Int>
MontState<Int> remo_step(const MontState<Int>& state_f, const Int& aw_f, const Int& beta,
                         const ParamSet& ps)
{
    return detail::montgomery_word_step(state_f, aw_f, beta, ps);
}

template <class Int>
bool compare_residues(const Int& gamma, const Int& gamma_f, std::uint64_t q)
{
    const Int m{q};
    return (gamma % m) != (gamma_f % m);
}

template <class Int>
bool compare(Comparator policy, const Int& gamma, const Int& gamma_f, const Int& beta,
             std::uint64_t K, const ParamSet& ps)
{
    switch (policy) {
    case Comparator::ModQ:
        return compare_residues(gamma, gamma_f, ps.q);
    case Comparator::Bitwise:
        return gamma != gamma_f;
    case Comparator::Offset:
        return gamma_f != gamma + Int{ps.q} * Int{K} * Int{beta >> ps.w};
    }
    return true;
}

template <class Int>
struct IterationRecord {
    Int aw{0};
    Int mu{0};
    Int gamma{0};
    Int aw_f{0};
    Int mu_f{0};
    Int gamma_f{0};
    bool flag = false;
};

template <class Int>
struct MmrfdOutcome {
    std::uint64_t result = 0; // main path, reduced into [0, q)
    Int gamma{0};             // raw main accumulator
    Int gamma_f{0};           // raw shadow accumulator
    bool fault_any = false;
};

/// Runs the protected reduction and reports each iteration to `visit`.
template <class Int, class Visitor>
MmrfdOutcome<Int> basic_mmrfd(std::uint64_t alpha, std::uint64_t beta, const ParamSet& ps,
                              const MmrfdOptions& opts, Visitor&& visit)
{
    const auto padded = pad_operands(alpha, beta, ps);
    const std::uint64_t K = opts.encoder.K;

    std::uint64_t main_alpha_fault = 0, main_beta_fault = 0;
    std::uint64_t shadow_alpha_fault = 0, shadow_beta_fault = 0;
    unsigned fault_from = 0;
    if (opts.fault) {
        const auto& f = *opts.fault;
        const std::uint64_t view_mask = low_mask(ps.padded_bits());
        if ((f.alpha_xor & ~view_mask) != 0 || (f.beta_xor & ~view_mask) != 0)
            throw Error(ErrorCode::OperandTooWide, "fault mask wider than the padded operand");
        if (f.path != FaultPath::Shadow) {
            main_alpha_fault = f.alpha_xor;
            main_beta_fault = f.beta_xor;
        }
        if (f.path != FaultPath::Main) {
            shadow_alpha_fault = f.alpha_xor;
            shadow_beta_fault = f.beta_xor;
        }
        fault_from = f.first_iteration;
    }

    MontState<Int> main{}, shadow{};
    bool fault_any = false;
    const std::uint64_t word_mask = ps.word_mask();
    for (unsigned i = 0; i < ps.words; ++i) {
        const bool faulted = i >= fault_from;
        const std::uint64_t alpha_m = padded.alpha ^ (faulted ? main_alpha_fault : 0);
        const std::uint64_t beta_m = padded.beta ^ (faulted ? main_beta_fault : 0);
        const std::uint64_t alpha_s = padded.alpha ^ (faulted ? shadow_alpha_fault : 0);
        const std::uint64_t beta_s = padded.beta ^ (faulted ? shadow_beta_fault : 0);

        const Int aw{(alpha_m >> (i * ps.w)) & word_mask};
        main = gamma_step(main, aw, Int{beta_m}, ps);

        const Int aw_s{(alpha_s >> (i * ps.w)) & word_mask};
        const Int aw_f = encode_word(aw_s, K, ps.q);
        shadow = remo_step(shadow, aw_f, Int{beta_s}, ps);

        const bool flag = compare(opts.comparator, main.gamma, shadow.gamma, Int{padded.beta}, K, ps);
        fault_any = fault_any || flag;
        visit(IterationRecord<Int>{aw, main.mu, main.gamma, aw_f, shadow.mu, shadow.gamma, flag});
    }

    // One subtraction suffices when beta < q; wider multipliers fall back to %.
    const Int q{ps.q};
    Int reduced = main.gamma;
    if (reduced >= q)
        reduced -= q;
    if (reduced >= q)
        reduced %= q;
    return {static_cast<std::uint64_t>(reduced), main.gamma, shadow.gamma, fault_any};
}

struct MontTrace {
    std::vector<IterationRecord<u128>> iterations;
    std::uint64_t result = 0;
    u128 gamma = 0;
    u128 gamma_f = 0;
    bool fault_any = false;
};

inline MontTrace mmrfd(std::uint64_t alpha, std::uint64_t beta, const ParamSet& ps,
                       const MmrfdOptions& opts = {})
{
    MontTrace trace;
    trace.iterations.reserve(ps.words);
    const auto out = basic_mmrfd<u128>(alpha, beta, ps, opts, [&](const IterationRecord<u128>& r) {
        trace.iterations.push_back(r);
    });
    trace.result = out.result;
    trace.gamma = out.gamma;
    trace.gamma_f = out.gamma_f;
    trace.fault_any = out.fault_any;
    return trace;
}

/// Trace-free variant for campaign loops.
inline MmrfdOutcome<u128> mmrfd_outcome(std::uint64_t alpha, std::uint64_t beta, const ParamSet& ps,
                                        const MmrfdOptions& opts = {})
{
    return basic_mmrfd<u128>(alpha, beta, ps, opts, [](const IterationRecord<u128>&) {});
}

inline std::uint64_t mont_mul(std::uint64_t alpha, std::uint64_t beta, const ParamSet& ps)
{
    return mmrfd_outcome(alpha, beta, ps).result;
}

/// alpha * beta * R^-1 mod q in arbitrary precision, without any word structure.
inline std::uint64_t mont_oracle(std::uint64_t alpha, std::uint64_t beta, const ParamSet& ps)
{
    using boost::multiprecision::cpp_int;
    const cpp_int q{ps.q};
    const cpp_int R = cpp_int{1} << ps.padded_bits();
    const cpp_int r_inv = boost::integer::mod_inverse(cpp_int{R % q}, q);
    const cpp_int value = (cpp_int{alpha} * cpp_int{beta} % q) * r_inv % q;
    return value.convert_to<std::uint64_t>();
}

inline std::uint64_t to_mont(std::uint64_t x, const ParamSet& ps)
{
    return mont_mul(x, ps.r2_mod_q, ps);
}

inline std::uint64_t from_mont(std::uint64_t x_mont, const ParamSet& ps)
{
    return mont_mul(x_mont, 1, ps);
}

/// Cycles until the gamma register holds the final value.
inline unsigned cycle_count(const ParamSet& ps) noexcept
{
    return ps.p == 0 ? ps.l / ps.w : ps.l / ps.w + 1;
}

} // namespace remo
