#pragma once

// Test-only reference implementations. Each one recomputes a quantity from
// its defining formula, independent of the library code path it checks.

#include <cstdint>
#include <map>
#include <vector>

#include "entropytest/bigint.hpp"
#include "entropytest/bit_sequence.hpp"
#include "entropytest/coders.hpp"

namespace testoracle {

// P(x) under a hidden-Markov source by explicit marginalization over all S^n
// hidden state paths.
inline double hmm_prob_bruteforce(const std::vector<std::vector<double>>& A,
                                  const std::vector<double>& emit0,
                                  const std::vector<double>& init,
                                  const entropytest::BitSequence& x) {
    const size_t S = emit0.size();
    const size_t n = x.length();
    uint64_t paths = 1;
    for (size_t t = 0; t < n; ++t) paths *= S;

    double total = 0.0;
    for (uint64_t code = 0; code < paths; ++code) {
        uint64_t c = code;
        std::vector<size_t> path(n);
        for (size_t t = 0; t < n; ++t) {
            path[t] = c % S;
            c /= S;
        }
        double p = init[path[0]];
        for (size_t t = 0; t < n; ++t) {
            p *= x[t] == 0 ? emit0[path[t]] : 1.0 - emit0[path[t]];
            if (t + 1 < n) p *= A[path[t]][path[t + 1]];
        }
        total += p;
    }
    return total;
}

// KT block probability of (a zeros, b ones) by the direct product formula.
inline long double kt_block_prob(uint64_t a, uint64_t b) {
    long double p = 1.0L;
    uint64_t total = 0;
    // interleave numerator and denominator factors to keep the value tame
    for (uint64_t j = 0; j < a; ++j) {
        p *= (static_cast<long double>(j) + 0.5L);
        p /= static_cast<long double>(++total);
    }
    for (uint64_t j = 0; j < b; ++j) {
        p *= (static_cast<long double>(j) + 0.5L);
        p /= static_cast<long double>(++total);
    }
    return p;
}

// P_KT(x) by the sequential product definition.
inline long double kt_prob_direct(const entropytest::BitSequence& x) {
    long double p = 1.0L;
    uint64_t count[2] = {0, 0};
    for (size_t t = 0; t < x.length(); ++t) {
        const int b = x[t];
        p *= (static_cast<long double>(count[b]) + 0.5L) / (static_cast<long double>(t) + 1.0L);
        ++count[b];
    }
    return p;
}

// P_CTW(x) for depth D by the closed-form recursion on final counts:
// Pw = Pe at depth D, else Pw = 1/2 Pe + 1/2 Pw(child0) Pw(child1).
// A node is a context string c_1..c_d, most recent symbol first; contexts
// before the start of x read as zeros.
inline long double ctw_prob_recursive_node(const entropytest::BitSequence& x, int D,
                                           const std::vector<int>& ctx) {
    const int d = static_cast<int>(ctx.size());
    uint64_t a = 0, b = 0;
    for (size_t t = 0; t < x.length(); ++t) {
        bool match = true;
        for (int j = 0; j < d; ++j) {
            const int bit =
                t >= static_cast<size_t>(j + 1) ? x[t - static_cast<size_t>(j + 1)] : 0;
            if (bit != ctx[static_cast<size_t>(j)]) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        if (x[t] == 0)
            ++a;
        else
            ++b;
    }
    const long double pe = kt_block_prob(a, b);
    if (d == D) return pe;
    std::vector<int> c0 = ctx, c1 = ctx;
    c0.push_back(0);
    c1.push_back(1);
    return 0.5L * pe +
           0.5L * ctw_prob_recursive_node(x, D, c0) * ctw_prob_recursive_node(x, D, c1);
}

inline long double ctw_prob_recursive(const entropytest::BitSequence& x, int D) {
    return ctw_prob_recursive_node(x, D, {});
}

// Exact Kraft sum over {0,1}^n: returns sum_x 2^{-L(x)} <= 1 decided in
// integer arithmetic; *sum_out gets the (rounded) sum for reporting.
inline bool kraft_sum_le_one(const entropytest::Coder& coder, int n, double* sum_out = nullptr) {
    using entropytest::BigInt;
    const uint64_t total = uint64_t{1} << n;
    std::vector<int64_t> lengths(total);
    int64_t max_len = 1;
    for (uint64_t w = 0; w < total; ++w) {
        lengths[w] = coder.code_length(entropytest::BitSequence::from_word(w, n));
        if (lengths[w] > max_len) max_len = lengths[w];
    }
    BigInt numer = 0;
    for (int64_t len : lengths) numer += BigInt(1) << static_cast<unsigned>(max_len - len);
    const BigInt denom = BigInt(1) << static_cast<unsigned>(max_len);
    if (sum_out) {
        *sum_out = entropytest::log2_big(numer) - static_cast<double>(max_len);
        *sum_out = std::exp2(*sum_out);
    }
    return numer <= denom;
}

}  // namespace testoracle
