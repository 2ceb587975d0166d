#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "remo/error.hpp"
#include "remo/wide_int.hpp"

namespace remo {

namespace detail {

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) noexcept
{
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) noexcept
{
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp != 0) {
        if (exp & 1)
            result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Inverse of a modulo m by the extended Euclidean algorithm; m need not be prime.
/// Returns 0 when gcd(a, m) != 1.
inline std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) noexcept
{
    __int128 old_r = a % m, r = m;
    __int128 old_s = 1, s = 0;
    while (r != 0) {
        const __int128 quot = old_r / r;
        __int128 tmp = old_r - quot * r;
        old_r = r;
        r = tmp;
        tmp = old_s - quot * s;
        old_s = s;
        s = tmp;
    }
    // old_r is gcd; old_s is the coefficient of a
    if (old_r != 1)
        return 0;
    __int128 inv = old_s % static_cast<__int128>(m);
    if (inv < 0)
        inv += m;
    return static_cast<std::uint64_t>(inv);
}

// Deterministic for all 64-bit inputs with this base set.
inline bool is_prime(std::uint64_t n) noexcept
{
    if (n < 2)
        return false;
    constexpr std::array<std::uint64_t, 12> bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (auto b : bases) {
        if (n % b == 0)
            return n == b;
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (auto a : bases) {
        std::uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1)
            continue;
        bool composite = true;
        for (unsigned r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite)
            return false;
    }
    return true;
}

} // namespace detail

/// Montgomery and transform parameters for one (q, l, w, n) configuration.
///
/// The operand is split into `words` words of `w` bits; when `l` is not a
/// multiple of `w` the operand is zero-extended by `pad_bits` bits so the
/// radix is R = 2^(w * words). `p` keeps the remainder l mod w, which selects
/// the padded branch and the extra cycle in `cycle_count`.
struct ParamSet {
    std::uint64_t q = 0;
    unsigned l = 0;
    unsigned w = 0;
    unsigned p = 0;
    unsigned pad_bits = 0;
    unsigned words = 0;
    u128 R = 0;
    std::uint64_t q_prime = 0; // -q^-1 mod 2^w
    std::uint64_t n = 0;
    std::uint64_t r_mod_q = 0;
    std::uint64_t r2_mod_q = 0;

    unsigned padded_bits() const noexcept { return w * words; }
    std::uint64_t word_mask() const noexcept { return low_mask(w); }
    std::uint64_t operand_limit() const noexcept { return std::uint64_t{1} << l; }
};

// Datapath limits: intermediates are carried in 128-bit registers.
inline constexpr unsigned kMaxOperandBits = 62;
inline constexpr unsigned kMaxModulusBits = 32;

inline ParamSet derive(std::uint64_t q, unsigned l, unsigned w, std::uint64_t n)
{
    if (q % 2 == 0)
        throw Error(ErrorCode::EvenModulus, "q = " + std::to_string(q) + " is even");
    if (q < 3)
        throw Error(ErrorCode::InvalidConfig, "q must be at least 3");
    if (q >> kMaxModulusBits)
        throw Error(ErrorCode::UnsupportedWidth, "q wider than 32 bits");
    if (!detail::is_prime(q))
        throw Error(ErrorCode::NotPrime, "q = " + std::to_string(q) + " is not prime");
    if (w == 0 || w > l)
        throw Error(ErrorCode::BadWordSize,
                    "w = " + std::to_string(w) + " with l = " + std::to_string(l));
    if (l > kMaxOperandBits)
        throw Error(ErrorCode::UnsupportedWidth, "l wider than 62 bits");
    if (n < 2 || (q - 1) % n != 0)
        throw Error(ErrorCode::NoRootOfUnity,
                    "n = " + std::to_string(n) + " does not divide q - 1");

    ParamSet ps;
    ps.q = q;
    ps.l = l;
    ps.w = w;
    ps.p = l % w;
    ps.pad_bits = ps.p == 0 ? 0 : w - ps.p;
    ps.words = (l + ps.pad_bits) / w;
    if (ps.words * w > 64)
        throw Error(ErrorCode::UnsupportedWidth, "padded operand wider than 64 bits");
    ps.R = u128{1} << (w * ps.words);
    ps.n = n;

    const std::uint64_t two_w = std::uint64_t{1} << w;
    const std::uint64_t q_inv = detail::inverse_mod(q % two_w, two_w);
    ps.q_prime = (two_w - q_inv) & (two_w - 1);

    ps.r_mod_q = static_cast<std::uint64_t>(ps.R % q);
    ps.r2_mod_q = detail::mul_mod(ps.r_mod_q, ps.r_mod_q, q);
    return ps;
}

struct PresetInfo {
    std::string_view name;
    std::uint64_t q;
    unsigned l;
    std::uint64_t n;
};

inline constexpr std::array<PresetInfo, 4> kPresets{{
    {"kyber", 3329, 12, 256},
    {"dilithium", 8380417, 23, 256},
    {"falcon", 12289, 14, 512},
    {"ntru", 12289, 14, 2048},
}};

inline constexpr unsigned kDefaultWordSize = 4;

inline const PresetInfo& preset_info(std::string_view name)
{
    for (const auto& p : kPresets) {
        if (p.name == name)
            return p;
    }
    throw Error(ErrorCode::UnknownPreset, std::string(name));
}

inline ParamSet preset(std::string_view name, unsigned w = kDefaultWordSize)
{
    const auto& info = preset_info(name);
    return derive(info.q, info.l, w, info.n);
}

} // namespace remo
