#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

namespace remo {

using u128 = unsigned __int128;

inline std::string to_decimal(u128 v)
{
    if (v == 0)
        return "0";
    std::string out;
    while (v != 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

inline unsigned bit_width(u128 v) noexcept
{
    unsigned n = 0;
    while (v != 0) {
        ++n;
        v >>= 1;
    }
    return n;
}

constexpr std::uint64_t low_mask(unsigned bits) noexcept
{
    return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

} // namespace remo
