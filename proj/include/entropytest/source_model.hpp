#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "entropytest/bit_sequence.hpp"
#include "entropytest/rng.hpp"

namespace entropytest {

enum class SourceKind { Uniform, Bernoulli, Markov, HiddenMarkov };

struct EntropyEstimate {
    enum class Method { ClosedForm, MonteCarloSMB };

    double value = 0.0;         // bits per symbol, in [0,1] for binary sources
    Method method = Method::ClosedForm;
    double ci_halfwidth = 0.0;  // 0 for ClosedForm; 2*sigma/sqrt(trials) for MC
    size_t n_used = 0;          // MC only: sample length per trial
    size_t trials = 0;          // MC only
};

// Binary entropy -p*log2(p) - (1-p)*log2(1-p); H(0) = H(1) = 0.
double binary_entropy(double p);

// Unique pi with pi P = pi and sum(pi) = 1, solved to residual <= 1e-12.
// P must be square with rows summing to 1 within 1e-12 and no negative
// entries; throws std::invalid_argument otherwise, or when the chain has no
// unique stationary distribution.
std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& P);

// A stationary ergodic binary source: the alternative hypothesis a test is
// powered against. Immutable after construction; all operations are pure, so
// instances are safe to share across threads.
//
// Ergodicity is enforced at construction by requiring strictly positive
// transition/emission probabilities, which also keeps every sequence
// probability nonzero.
class SourceModel {
public:
    // Exact Bernoulli(1/2); behaves identically to bernoulli(0.5) everywhere.
    static SourceModel uniform();

    // i.i.d. bits with P(0) = p0, 0 < p0 < 1.
    static SourceModel bernoulli(double p0);

    // Order-k binary Markov chain. p0_by_context[c] = P(next symbol = 0 |
    // last k symbols = c), where context index c reads the last k symbols
    // oldest-first as a binary number (most recent symbol = least significant
    // bit). Requires exactly 2^k entries, each strictly inside (0,1). The
    // initial context is drawn from the stationary distribution, so the
    // process is stationary.
    static SourceModel markov(int order, const std::vector<double>& p0_by_context);

    // Hidden Markov source: S hidden states, row-stochastic transition matrix
    // with strictly positive entries, emit0[s] = P(emit 0 | state s) in (0,1).
    // The hidden chain starts from its stationary distribution.
    static SourceModel hidden_markov(const std::vector<std::vector<double>>& transition,
                                     const std::vector<double>& emit0);

    SourceKind kind() const { return kind_; }

    // Short display/CSV id, e.g. "bernoulli(p0=0.8)". Contains no commas.
    std::string id() const;

    // Deterministic sample of length n >= 1 for a given seed.
    BitSequence sample(size_t n, uint64_t seed) const;

    // log2 of the stationary process probability of x. Exact up to double
    // rounding; never -inf thanks to the ergodicity guard.
    double log_prob(const BitSequence& x) const;

    // Entropy rate h in bits/symbol. Closed form for uniform/Bernoulli/Markov;
    // hidden-Markov models fall back to a Monte Carlo estimate of the
    // per-symbol log-loss with defaults n_used = 65536, trials = 32.
    EntropyEstimate entropy_rate() const;

    // Monte Carlo entropy estimate: mean of -(1/n)*log2 nu(x) over samples.
    EntropyEstimate entropy_rate_smb(size_t n_used, size_t trials, uint64_t seed) const;

    // --- parameter access (used by the NP p-value engines) ---

    double p0() const;                                    // uniform/Bernoulli
    int order() const { return order_; }                  // Markov
    const std::vector<double>& context_p0() const { return ctx_p0_; }
    const std::vector<double>& context_stationary() const { return ctx_pi_; }
    size_t hidden_states() const { return emit0_.size(); }
    const std::vector<std::vector<double>>& transition() const { return trans_; }
    const std::vector<double>& emit0() const { return emit0_; }

    // log2 probability of an i.i.d. type class: n-symbol words with `ones`
    // ones under Bernoulli(p0). log_prob routes Bernoulli/uniform sequences
    // through this very function, so class members compare bit-identically.
    static double iid_class_log2prob(size_t n, uint64_t ones, double p0);

    // log2 probability of an order-1 Markov type class: first symbol `first`
    // and transition counts (n00, n01, n10, n11). Shared with the exact NP
    // engine for the same bit-identical-comparison reason as above.
    double markov1_class_log2prob(int first, int64_t n00, int64_t n01, int64_t n10,
                                  int64_t n11) const;

private:
    SourceModel() = default;

    double closed_form_entropy() const;
    double markov_log_prob(const BitSequence& x) const;
    double hmm_log_prob(const BitSequence& x) const;

    SourceKind kind_ = SourceKind::Uniform;
    double p0_ = 0.5;  // uniform/Bernoulli

    // Markov
    int order_ = 0;
    std::vector<double> ctx_p0_;        // size 2^k
    std::vector<double> ctx_pi_;        // stationary distribution over contexts
    std::vector<double> ctx_log2_p0_;   // log2 P(0|c)
    std::vector<double> ctx_log2_p1_;   // log2 P(1|c)
    std::vector<double> ctx_log2_pi_;   // log2 pi(c)

    // Hidden Markov
    std::vector<std::vector<double>> trans_;
    std::vector<double> emit0_;
    std::vector<double> hidden_pi_;
};

}  // namespace entropytest
