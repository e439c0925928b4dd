#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace entropytest {

// Arbitrary-precision unsigned counts. Exact p-value numerators reach 2^n for
// n in the hundreds, far past 64 bits.
using BigInt = boost::multiprecision::cpp_int;

// ceil(log2 m) for m >= 1.
inline int64_t ceil_log2_u64(uint64_t m) {
    if (m == 0) throw std::invalid_argument("ceil_log2_u64: zero");
    if (m == 1) return 0;
    return static_cast<int64_t>(std::bit_width(m - 1));
}

// ceil(log2 m) for m >= 1, exact in integer arithmetic.
inline int64_t ceil_log2_big(const BigInt& m) {
    if (m <= 0) throw std::invalid_argument("ceil_log2_big: non-positive");
    if (m == 1) return 0;
    BigInt t = m - 1;
    return static_cast<int64_t>(boost::multiprecision::msb(t)) + 1;
}

// log2 of a positive big integer, accurate to double precision (uses the top
// 63 bits of the value).
inline double log2_big(const BigInt& v) {
    if (v <= 0) throw std::invalid_argument("log2_big: non-positive");
    const auto top = static_cast<int64_t>(boost::multiprecision::msb(v));
    if (top <= 62) return std::log2(v.convert_to<double>());
    BigInt t = v >> (top - 62);
    return static_cast<double>(top - 62) + std::log2(t.convert_to<double>());
}

// C(n, k) as an exact integer; 0 when k is out of range.
inline BigInt binomial(int64_t n, int64_t k) {
    if (k < 0 || k > n || n < 0) return 0;
    if (k > n - k) k = n - k;
    BigInt c = 1;
    for (int64_t j = 1; j <= k; ++j) {
        c *= (n - k + j);
        c /= j;  // exact at every step
    }
    return c;
}

}  // namespace entropytest
