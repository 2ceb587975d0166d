#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "remo/error.hpp"
#include "remo/memory.hpp"
#include "remo/montgomery.hpp"
#include "remo/params.hpp"

namespace remo {

struct Poly {
    std::vector<std::uint64_t> coeffs;

    std::size_t size() const noexcept { return coeffs.size(); }
    std::uint64_t& operator[](std::size_t t) { return coeffs[t]; }
    std::uint64_t operator[](std::size_t t) const { return coeffs[t]; }
    bool operator==(const Poly&) const = default;
};

inline void validate_poly(const Poly& a, const ParamSet& ps)
{
    if (a.size() != ps.n)
        throw Error(ErrorCode::InvalidConfig,
                    "polynomial has " + std::to_string(a.size()) + " coefficients, expected " +
                        std::to_string(ps.n));
    for (auto c : a.coeffs) {
        if (c >= ps.q)
            throw Error(ErrorCode::InvalidConfig, "coefficient " + std::to_string(c) + " not reduced mod q");
    }
}

/// Primitive n-th root of unity g^((q-1)/n) for the first base g that
/// yields one, n a power of two.
inline std::uint64_t find_root(std::uint64_t q, std::uint64_t n)
{
    if (n < 2 || (q - 1) % n != 0)
        throw Error(ErrorCode::NoRootOfUnity, "n = " + std::to_string(n) + " does not divide q - 1");
    log2_exact(n);
    const std::uint64_t exp = (q - 1) / n;
    for (std::uint64_t g = 2; g < q; ++g) {
        const std::uint64_t omega = detail::pow_mod(g, exp, q);
        if (detail::pow_mod(omega, n / 2, q) == q - 1)
            return omega;
    }
    throw Error(ErrorCode::NoRootOfUnity, "no primitive root found");
}

inline std::uint64_t find_root(const ParamSet& ps) { return find_root(ps.q, ps.n); }

/// Twiddle factors in plain form and pre-multiplied by R, so that one
/// Montgomery product with a canonical coefficient yields a canonical result.
struct TwiddleTable {
    std::uint64_t omega = 0;
    std::vector<std::uint64_t> powers;
    std::vector<std::uint64_t> inv_powers;
    std::uint64_t n_inv = 0;
    std::vector<std::uint64_t> mont_powers;
    std::vector<std::uint64_t> mont_inv_powers;
    std::uint64_t mont_n_inv = 0;
};

inline TwiddleTable make_twiddles(const ParamSet& ps, std::optional<std::uint64_t> omega = std::nullopt)
{
    TwiddleTable t;
    t.omega = omega ? *omega : find_root(ps);
    if (detail::pow_mod(t.omega, ps.n, ps.q) != 1 || detail::pow_mod(t.omega, ps.n / 2, ps.q) != ps.q - 1)
        throw Error(ErrorCode::NoRootOfUnity, "omega is not a primitive n-th root of unity");
    const std::uint64_t omega_inv = detail::inverse_mod(t.omega, ps.q);
    t.powers.resize(ps.n);
    t.inv_powers.resize(ps.n);
    t.mont_powers.resize(ps.n);
    t.mont_inv_powers.resize(ps.n);
    std::uint64_t fwd = 1, inv = 1;
    for (std::uint64_t e = 0; e < ps.n; ++e) {
        t.powers[e] = fwd;
        t.inv_powers[e] = inv;
        t.mont_powers[e] = detail::mul_mod(fwd, ps.r_mod_q, ps.q);
        t.mont_inv_powers[e] = detail::mul_mod(inv, ps.r_mod_q, ps.q);
        fwd = detail::mul_mod(fwd, t.omega, ps.q);
        inv = detail::mul_mod(inv, omega_inv, ps.q);
    }
    t.n_inv = detail::inverse_mod(ps.n % ps.q, ps.q);
    t.mont_n_inv = detail::mul_mod(t.n_inv, ps.r_mod_q, ps.q);
    return t;
}

struct ButterflyOut {
    std::uint64_t u = 0;
    std::uint64_t v = 0;
    bool fault = false;
};

/// (U + V, U - V) mod q with V = v * omega computed by the protected reduction.
inline ButterflyOut butterfly(std::uint64_t u, std::uint64_t v, std::uint64_t omega_mont, const ParamSet& ps,
                              const MmrfdOptions& opts = {})
{
    const auto prod = mmrfd_outcome(v, omega_mont, ps, opts);
    const std::uint64_t V = prod.result;
    const std::uint64_t sum = u + V >= ps.q ? u + V - ps.q : u + V;
    const std::uint64_t diff = u + ps.q - V >= ps.q ? u - V : u + ps.q - V;
    return {sum, diff, prod.fault_any};
}

struct TransformOptions {
    EncoderConfig encoder{};
    Comparator comparator = Comparator::ModQ;
    /// Optional per-butterfly operand fault, keyed by butterfly index.
    std::function<std::optional<OperandFault>(std::uint64_t)> inject;
    /// Optional observer for the generated memory traffic.
    std::function<void(const AccessEvent&)> observe;
    unsigned ram_id = 0;
};

struct TransformResult {
    Poly out;
    bool fault = false;
    std::uint64_t butterflies = 0;
    std::uint64_t faulted_butterflies = 0;
};

namespace detail {

inline void bit_reverse_permute(std::vector<std::uint64_t>& a)
{
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
}

// Decimation in time over the ijk stream: bit-reversed input, natural output.
inline TransformResult transform(const Poly& in, const std::vector<std::uint64_t>& mont_twiddles,
                                 const ParamSet& ps, const TransformOptions& opts)
{
    validate_poly(in, ps);
    TransformResult res{in, false, 0, 0};
    auto& a = res.out.coeffs;
    bit_reverse_permute(a);

    MmrfdOptions mopts{opts.encoder, opts.comparator, std::nullopt};
    for_each_ijk(ps.n, [&](const IjkTuple& t) {
        const auto [upper, lower] = ram_addresses(t);
        const std::uint64_t rom = rom_address(t, ps.n);
        if (opts.observe) {
            for_each_access_of(t, opts.ram_id, opts.observe);
        }
        mopts.fault = opts.inject ? opts.inject(t.iteration) : std::nullopt;
        const auto bf = butterfly(a[upper], a[lower], mont_twiddles[rom], ps, mopts);
        a[upper] = bf.u;
        a[lower] = bf.v;
        ++res.butterflies;
        if (bf.fault) {
            res.fault = true;
            ++res.faulted_butterflies;
        }
    });
    if (res.butterflies != butterflies_per_transform(ps.n))
        throw InvariantViolation("butterfly count mismatch");
    return res;
}

} // namespace detail

inline TransformResult ntt_forward(const Poly& in, const TwiddleTable& table, const ParamSet& ps,
                                   const TransformOptions& opts)
{
    return detail::transform(in, table.mont_powers, ps, opts);
}

inline Poly ntt_forward(const Poly& in, const TwiddleTable& table, const ParamSet& ps)
{
    return ntt_forward(in, table, ps, TransformOptions{}).out;
}

inline TransformResult ntt_inverse(const Poly& in, const TwiddleTable& table, const ParamSet& ps,
                                   const TransformOptions& opts)
{
    auto res = detail::transform(in, table.mont_inv_powers, ps, opts);
    for (auto& c : res.out.coeffs)
        c = mont_mul(c, table.mont_n_inv, ps);
    return res;
}

inline Poly ntt_inverse(const Poly& in, const TwiddleTable& table, const ParamSet& ps)
{
    return ntt_inverse(in, table, ps, TransformOptions{}).out;
}

/// c[t] = a[t] * b[t] mod q through two Montgomery products.
inline Poly pointwise_mul(const Poly& a, const Poly& b, const ParamSet& ps)
{
    if (a.size() != b.size())
        throw Error(ErrorCode::InvalidConfig, "pointwise product of unequal lengths");
    Poly c{std::vector<std::uint64_t>(a.size())};
    for (std::size_t t = 0; t < a.size(); ++t)
        c[t] = mont_mul(mont_mul(a[t], b[t], ps), ps.r2_mod_q, ps);
    return c;
}

} // namespace remo
