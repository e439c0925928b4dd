#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "entropytest/bigint.hpp"
#include "entropytest/bit_sequence.hpp"
#include "entropytest/coders.hpp"
#include "entropytest/source_model.hpp"

namespace entropytest {

enum class StatKind {
    CoderTau,   // n - |phi(x)|, integer-valued
    NPLogProb,  // log2 nu(x), the likelihood ordering of the NP test
};

struct Statistic {
    double value = 0.0;
    StatKind kind = StatKind::CoderTau;
};

// Statistic evaluator over {0,1}^n; larger values mean "less random".
using StatisticFn = std::function<double(const BitSequence&)>;

StatisticFn coder_tau_fn(const Coder& coder);
StatisticFn np_logprob_fn(const SourceModel& model);

enum class PvMethod { ExactEnumeration, TypeClassExact, MonteCarlo, KraftBound };

// A p-value plus its provenance. The exact engines carry the integer count
// numerator (p = numerator / 2^n); log2_value stays finite even when the
// plain double would underflow (e.g. 2^-18000 at cryptographic lengths).
struct PValue {
    PvMethod method = PvMethod::KraftBound;
    std::string label;        // method string for reports/CSV, e.g. "mc:M=100000"
    double log2_value = 0.0;  // log2 of the p-value, <= 0
    double value = 1.0;       // exp2(log2_value); 0 if below double range
    int64_t n = 0;            // sequence length (denominator exponent for exact engines)

    BigInt numerator;         // exact engines only, >= 1

    uint64_t trials = 0;        // Monte Carlo: M
    uint64_t exceed_count = 0;  // Monte Carlo: r
    double ci_low = 0.0;        // Monte Carlo: 99% Clopper-Pearson interval
    double ci_high = 1.0;
};

enum class Decision { Accept, Reject };

// tau_phi(x) = n - |phi(x)|.
Statistic tau_statistic(const Coder& coder, const BitSequence& x);

// Reject H0 iff tau >= -log2(alpha). Kraft compliance of the coder makes the
// Type I error of this rule at most alpha.
Decision decide(const Coder& coder, const BitSequence& x, double alpha);
Decision decide_from_tau(double tau, double alpha);

// p = min(1, 2^-tau): a valid p-value for any Kraft-compliant coder, and the
// only method that scales to cryptographic lengths.
PValue pvalue_kraft_bound(const Statistic& tau);

// Exact count of { y in {0,1}^n : stat(y) >= stat(x) } over the full cube.
// Works for either statistic kind. Refuses n > n_limit (default 24, ~16.7M
// evaluations) and suggests Monte Carlo instead.
PValue pvalue_exact_enum(const StatisticFn& stat, const BitSequence& x, size_t n_limit = 24);

// Exact NP p-value against Bernoulli(p0) for any n: nu(y) depends only on the
// number of ones, so the count is a sum of binomials over the qualifying type
// classes (ties included).
PValue np_pvalue_iid(double p0, const BitSequence& x);

// Exact NP p-value against an order-1 Markov model. nu(y) depends only on
// (first symbol, transition counts); classes are enumerated through their run
// structure and counted with exact binomials. O(n^2) classes, so the default
// guard is n <= 512.
PValue np_pvalue_markov(const SourceModel& model, const BitSequence& x, size_t n_limit = 512);

// Conservative Monte Carlo estimate (r+1)/(M+1) of the p-value with a 99%
// Clopper-Pearson interval for r/M. Deterministic for a fixed seed; trial i
// uses seed + i.
PValue pvalue_monte_carlo(const StatisticFn& stat, const BitSequence& x, uint64_t trials,
                          uint64_t seed);

// Smallest integer n strictly greater than -log2(alpha) / (1 - h). Throws for
// h >= 1 (the source is indistinguishable from uniform at any n).
uint64_t required_sample_size(double alpha, double h);

// --- p-value method selection grammar ("exact", "mc:M=...", "bound",
// "np-iid", "np-markov") shared by the CLI and experiment configs ---

struct PvMethodSpec {
    enum class Kind { Bound, Exact, MonteCarlo, NpIid, NpMarkov };
    Kind kind = Kind::Bound;
    uint64_t mc_trials = 10000;

    std::string name() const;
};

PvMethodSpec parse_pvalue_method(const std::string& s);

struct TestReport {
    std::string coder_id;
    size_t n = 0;
    int64_t code_length = 0;
    Statistic statistic;
    std::vector<PValue> pvalues;  // primary first
    double alpha = 0.01;
    Decision decision = Decision::Accept;
    double exponent = 0.0;  // -(1/n) * log2(primary p-value)
};

// Runs the compression test: statistic, decision at level alpha, and one
// p-value per requested method (seed feeds Monte Carlo methods only).
TestReport run_coder_test(const Coder& coder, const BitSequence& x, double alpha,
                          const std::vector<PvMethodSpec>& methods, uint64_t seed);

}  // namespace entropytest
