#pragma once

// Reference computations for the tests. Nothing here calls into the
// library's arithmetic: loops are deliberately naive.

#include <cstdint>
#include <vector>

namespace oracle {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t q)
{
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % q);
}

/// x^e mod q by repeated multiplication (e small).
inline std::uint64_t slow_pow(std::uint64_t x, std::uint64_t e, std::uint64_t q)
{
    std::uint64_t r = 1 % q;
    for (std::uint64_t t = 0; t < e; ++t)
        r = mulmod(r, x, q);
    return r;
}

/// Inverse by exhaustive search (q small) or Fermat with square-and-multiply.
inline std::uint64_t inverse(std::uint64_t a, std::uint64_t q)
{
    std::uint64_t r = 1, b = a % q, e = q - 2;
    while (e) {
        if (e & 1)
            r = mulmod(r, b, q);
        b = mulmod(b, b, q);
        e >>= 1;
    }
    return r;
}

/// Every x in [2, q) that is a primitive n-th root of unity (n power of two).
inline std::vector<std::uint64_t> primitive_roots(std::uint64_t q, std::uint64_t n)
{
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = 2; x < q; ++x) {
        if (slow_pow(x, n, q) == 1 && slow_pow(x, n / 2, q) == q - 1)
            out.push_back(x);
    }
    return out;
}

/// out[s] = sum_t a[t] * omega^(s*t) mod q.
inline std::vector<std::uint64_t> evaluate(const std::vector<std::uint64_t>& a, std::uint64_t omega,
                                           std::uint64_t q)
{
    const std::size_t n = a.size();
    std::vector<std::uint64_t> out(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
        const std::uint64_t step = slow_pow(omega, s, q);
        std::uint64_t x = 1, acc = 0;
        for (std::size_t t = 0; t < n; ++t) {
            acc = (acc + mulmod(a[t], x, q)) % q;
            x = mulmod(x, step, q);
        }
        out[s] = acc;
    }
    return out;
}

/// a * b mod (x^n - 1, q).
inline std::vector<std::uint64_t> cyclic_convolution(const std::vector<std::uint64_t>& a,
                                                     const std::vector<std::uint64_t>& b, std::uint64_t q)
{
    const std::size_t n = a.size();
    std::vector<std::uint64_t> out(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t idx = (i + j) % n;
            out[idx] = (out[idx] + mulmod(a[i], b[j], q)) % q;
        }
    return out;
}

inline unsigned popcount(std::uint64_t x)
{
    unsigned c = 0;
    for (; x; x &= x - 1)
        ++c;
    return c;
}

/// All masks over `width` bits with exactly `eta` set bits (random mode) or
/// all contiguous runs of `eta` bits (burst mode).
inline std::vector<std::uint64_t> all_masks(unsigned width, unsigned eta, bool burst)
{
    std::vector<std::uint64_t> out;
    if (burst) {
        for (unsigned s = 0; s + eta <= width; ++s)
            out.push_back(((std::uint64_t{1} << eta) - 1) << s);
        return out;
    }
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << width); ++m) {
        if (popcount(m) == eta)
            out.push_back(m);
    }
    return out;
}

enum class AddrTarget { J, K, Both };

/// Exact detection probability of one transform's address faults under the
/// stage-aligned rules, enumerating every butterfly and every mask (n = 256:
/// stage i has j < 2^i and k < 128 >> i; j is legal iff j < 2^i, k is legal
/// iff k < 128 >> i; both fields are 7 bits wide).
inline double address_detection(AddrTarget target, unsigned eta, bool burst)
{
    const unsigned width = 7;
    const auto masks = all_masks(width, eta, burst);
    double total = 0.0, detected = 0.0;
    for (unsigned i = 0; i < 8; ++i) {
        const std::uint64_t jmax = std::uint64_t{1} << i;
        const std::uint64_t kmax = std::uint64_t{128} >> i;
        for (std::uint64_t j = 0; j < jmax; ++j)
            for (std::uint64_t k = 0; k < kmax; ++k) {
                double jd = 0, kd = 0;
                for (auto m : masks) {
                    jd += ((j ^ m) >= jmax) ? 1 : 0;
                    kd += ((k ^ m) >= kmax) ? 1 : 0;
                }
                const double nm = static_cast<double>(masks.size());
                total += 1.0;
                switch (target) {
                case AddrTarget::J: detected += jd / nm; break;
                case AddrTarget::K: detected += kd / nm; break;
                case AddrTarget::Both: detected += 1.0 - (1.0 - jd / nm) * (1.0 - kd / nm); break;
                }
            }
    }
    return detected / total;
}

/// Exact detection rate of eta-bit faults in beta (main path only), alpha
/// and beta uniform in [0, q), flips over the low l bits. A fault goes unseen
/// iff alpha == 0 or the signed change of beta is a multiple of q.
inline double omega_detection(std::uint64_t q, unsigned l, unsigned eta, bool burst = false)
{
    const auto masks = burst ? all_masks(l, eta, true) : std::vector<std::uint64_t>{};
    std::uint64_t zero = 0, total = 0;
    auto count = [&](std::uint64_t mask) {
        for (std::uint64_t beta = 0; beta < q; ++beta) {
            long long delta = 0;
            for (unsigned b = 0; b < l; ++b)
                if ((mask >> b) & 1)
                    delta += ((beta >> b) & 1) ? -(1ll << b) : (1ll << b);
            zero += (delta % static_cast<long long>(q)) == 0;
            ++total;
        }
    };
    if (burst) {
        for (auto m : masks)
            count(m);
    } else {
        // walk all eta-subsets of [0, l) in lexicographic order
        std::vector<unsigned> pick(eta);
        for (unsigned t = 0; t < eta; ++t)
            pick[t] = t;
        while (true) {
            std::uint64_t m = 0;
            for (unsigned b : pick)
                m |= std::uint64_t{1} << b;
            count(m);
            int t = static_cast<int>(eta) - 1;
            while (t >= 0 && pick[t] == l - eta + t)
                --t;
            if (t < 0)
                break;
            ++pick[t];
            for (unsigned u = t + 1; u < eta; ++u)
                pick[u] = pick[u - 1] + 1;
        }
    }
    const double p_alpha0 = 1.0 / static_cast<double>(q);
    const double p_delta0 = static_cast<double>(zero) / static_cast<double>(total);
    return 1.0 - (p_alpha0 + (1.0 - p_alpha0) * p_delta0);
}

} // namespace oracle
