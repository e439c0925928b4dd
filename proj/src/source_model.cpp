#include "entropytest/source_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace entropytest {

namespace {

constexpr uint64_t kDefaultSmbSeed = 0x5eedf00d1234abcdULL;
constexpr int kMaxMarkovOrder = 10;  // dense stationary solve stays tractable

std::string fmt_prob(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Draw an index from a discrete distribution by CDF inversion.
template <typename Probs>
size_t draw_index(const Probs& p, double u) {
    double cum = 0.0;
    for (size_t i = 0; i + 1 < p.size(); ++i) {
        cum += p[i];
        if (u < cum) return i;
    }
    return p.size() - 1;
}

}  // namespace

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& P) {
    const size_t S = P.size();
    if (S == 0) throw std::invalid_argument("stationary_distribution: empty matrix");
    for (const auto& row : P) {
        if (row.size() != S)
            throw std::invalid_argument("stationary_distribution: matrix not square");
        double sum = 0.0;
        for (double v : row) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("stationary_distribution: negative or non-finite entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("stationary_distribution: row does not sum to 1");
    }

    // Solve (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    std::vector<std::vector<double>> A(S, std::vector<double>(S + 1, 0.0));
    for (size_t i = 0; i + 1 < S; ++i) {
        for (size_t j = 0; j < S; ++j) A[i][j] = P[j][i] - (i == j ? 1.0 : 0.0);
        A[i][S] = 0.0;
    }
    for (size_t j = 0; j < S; ++j) A[S - 1][j] = 1.0;
    A[S - 1][S] = 1.0;

    for (size_t col = 0; col < S; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < S; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-13)
            throw std::invalid_argument("stationary_distribution: no unique solution");
        std::swap(A[piv], A[col]);
        for (size_t r = col + 1; r < S; ++r) {
            const double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (size_t c = col; c <= S; ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<double> pi(S, 0.0);
    for (size_t i = S; i-- > 0;) {
        double v = A[i][S];
        for (size_t j = i + 1; j < S; ++j) v -= A[i][j] * pi[j];
        pi[i] = v / A[i][i];
    }

    double residual = 0.0;
    for (size_t j = 0; j < S; ++j) {
        double v = -pi[j];
        for (size_t i = 0; i < S; ++i) v += pi[i] * P[i][j];
        residual = std::max(residual, std::abs(v));
        if (pi[j] < -1e-12)
            throw std::invalid_argument("stationary_distribution: negative component");
        if (pi[j] < 0.0) pi[j] = 0.0;
    }
    if (residual > 1e-12)
        throw std::runtime_error("stationary_distribution: residual exceeds 1e-12");
    return pi;
}

SourceModel SourceModel::uniform() {
    SourceModel m = bernoulli(0.5);
    m.kind_ = SourceKind::Uniform;
    return m;
}

SourceModel SourceModel::bernoulli(double p0) {
    if (!(p0 > 0.0 && p0 < 1.0))
        throw std::domain_error("bernoulli: p0 must lie strictly inside (0,1)");
    SourceModel m;
    m.kind_ = SourceKind::Bernoulli;
    m.p0_ = p0;
    return m;
}

SourceModel SourceModel::markov(int order, const std::vector<double>& p0_by_context) {
    if (order < 0) throw std::domain_error("markov: order must be >= 0");
    if (order > kMaxMarkovOrder) throw std::domain_error("markov: order too large (max 10)");
    const size_t n_ctx = size_t{1} << order;
    if (p0_by_context.size() != n_ctx)
        throw std::domain_error("markov: table must have exactly 2^k entries");
    for (double p : p0_by_context)
        if (!(p > 0.0 && p < 1.0))
            throw std::domain_error("markov: every P(0|ctx) must lie strictly inside (0,1)");

    SourceModel m;
    m.kind_ = SourceKind::Markov;
    m.order_ = order;
    m.ctx_p0_ = p0_by_context;
    m.ctx_log2_p0_.resize(n_ctx);
    m.ctx_log2_p1_.resize(n_ctx);
    for (size_t c = 0; c < n_ctx; ++c) {
        m.ctx_log2_p0_[c] = std::log2(p0_by_context[c]);
        m.ctx_log2_p1_[c] = std::log2(1.0 - p0_by_context[c]);
    }

    // Context chain: c -> ((c<<1)|s) & mask with probability P(s|c).
    const size_t mask = n_ctx - 1;
    std::vector<std::vector<double>> chain(n_ctx, std::vector<double>(n_ctx, 0.0));
    for (size_t c = 0; c < n_ctx; ++c) {
        chain[c][((c << 1) | 0u) & mask] += p0_by_context[c];
        chain[c][((c << 1) | 1u) & mask] += 1.0 - p0_by_context[c];
    }
    m.ctx_pi_ = stationary_distribution(chain);
    m.ctx_log2_pi_.resize(n_ctx);
    for (size_t c = 0; c < n_ctx; ++c) m.ctx_log2_pi_[c] = std::log2(m.ctx_pi_[c]);
    return m;
}

SourceModel SourceModel::hidden_markov(const std::vector<std::vector<double>>& transition,
                                       const std::vector<double>& emit0) {
    const size_t S = transition.size();
    if (S == 0 || emit0.size() != S)
        throw std::domain_error("hidden_markov: need S states with one emission probability each");
    for (const auto& row : transition) {
        if (row.size() != S) throw std::domain_error("hidden_markov: transition matrix not square");
        for (double v : row)
            if (!(v > 0.0)) throw std::domain_error("hidden_markov: transitions must be > 0");
    }
    for (double b : emit0)
        if (!(b > 0.0 && b < 1.0))
            throw std::domain_error("hidden_markov: emissions must lie strictly inside (0,1)");

    SourceModel m;
    m.kind_ = SourceKind::HiddenMarkov;
    m.trans_ = transition;
    m.emit0_ = emit0;
    m.hidden_pi_ = stationary_distribution(transition);  // also validates row sums
    return m;
}

std::string SourceModel::id() const {
    switch (kind_) {
        case SourceKind::Uniform:
            return "uniform";
        case SourceKind::Bernoulli:
            return "bernoulli(p0=" + fmt_prob(p0_) + ")";
        case SourceKind::Markov: {
            std::string s = "markov(k=" + std::to_string(order_) + ";p0=";
            for (size_t c = 0; c < ctx_p0_.size(); ++c) {
                if (c) s += ';';
                s += fmt_prob(ctx_p0_[c]);
            }
            return s + ")";
        }
        case SourceKind::HiddenMarkov: {
            std::string s = "hmm(S=" + std::to_string(emit0_.size()) + ";A=";
            for (size_t i = 0; i < trans_.size(); ++i) {
                if (i) s += '|';
                for (size_t j = 0; j < trans_[i].size(); ++j) {
                    if (j) s += ';';
                    s += fmt_prob(trans_[i][j]);
                }
            }
            s += ";B=";
            for (size_t i = 0; i < emit0_.size(); ++i) {
                if (i) s += ';';
                s += fmt_prob(emit0_[i]);
            }
            return s + ")";
        }
    }
    return "?";
}

double SourceModel::p0() const {
    if (kind_ != SourceKind::Uniform && kind_ != SourceKind::Bernoulli)
        throw std::logic_error("p0: not an i.i.d. model");
    return p0_;
}

BitSequence SourceModel::sample(size_t n, uint64_t seed) const {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    Rng rng(seed);
    std::vector<uint8_t> bits(n);

    switch (kind_) {
        case SourceKind::Uniform:
        case SourceKind::Bernoulli: {
            for (size_t t = 0; t < n; ++t)
                bits[t] = rng.next_double() < p0_ ? 0 : 1;
            break;
        }
        case SourceKind::Markov: {
            const size_t mask = ctx_p0_.size() - 1;
            size_t ctx = 0;
            if (order_ > 0) ctx = draw_index(ctx_pi_, rng.next_double());
            for (size_t t = 0; t < n; ++t) {
                const uint8_t b = rng.next_double() < ctx_p0_[ctx] ? 0 : 1;
                bits[t] = b;
                ctx = ((ctx << 1) | b) & mask;
            }
            break;
        }
        case SourceKind::HiddenMarkov: {
            size_t s = draw_index(hidden_pi_, rng.next_double());
            for (size_t t = 0; t < n; ++t) {
                bits[t] = rng.next_double() < emit0_[s] ? 0 : 1;
                s = draw_index(trans_[s], rng.next_double());
            }
            break;
        }
    }
    return BitSequence(std::move(bits));
}

double SourceModel::iid_class_log2prob(size_t n, uint64_t ones, double p0) {
    const double l0 = std::log2(p0);
    const double l1 = std::log2(1.0 - p0);
    return static_cast<double>(n - ones) * l0 + static_cast<double>(ones) * l1;
}

double SourceModel::markov1_class_log2prob(int first, int64_t n00, int64_t n01, int64_t n10,
                                           int64_t n11) const {
    if (kind_ != SourceKind::Markov || order_ != 1)
        throw std::logic_error("markov1_class_log2prob: model is not order-1 Markov");
    // Fixed accumulation order; log_prob uses this same path for order-1
    // sequences so that every member of a type class gets the identical double.
    double lp = ctx_log2_pi_[static_cast<size_t>(first)];
    lp += static_cast<double>(n00) * ctx_log2_p0_[0];
    lp += static_cast<double>(n01) * ctx_log2_p1_[0];
    lp += static_cast<double>(n10) * ctx_log2_p0_[1];
    lp += static_cast<double>(n11) * ctx_log2_p1_[1];
    return lp;
}

double SourceModel::markov_log_prob(const BitSequence& x) const {
    const size_t n = x.length();
    const size_t k = static_cast<size_t>(order_);

    if (k == 0) return iid_class_log2prob(n, x.count_ones(), ctx_p0_[0]);

    if (k == 1) {
        int64_t cnt[2][2] = {{0, 0}, {0, 0}};
        for (size_t t = 1; t < n; ++t) ++cnt[x[t - 1]][x[t]];
        return markov1_class_log2prob(x[0], cnt[0][0], cnt[0][1], cnt[1][0], cnt[1][1]);
    }

    const size_t n_ctx = ctx_p0_.size();
    const size_t mask = n_ctx - 1;

    if (n < k) {
        // Marginal of the stationary context distribution: sum pi over all
        // contexts whose most recent n symbols equal x.
        size_t low = 0;
        for (size_t i = 0; i < n; ++i) low = (low << 1) | x[i];
        const size_t low_mask = (size_t{1} << n) - 1;
        double p = 0.0;
        for (size_t c = 0; c < n_ctx; ++c)
            if ((c & low_mask) == low) p += ctx_pi_[c];
        return std::log2(p);
    }

    size_t ctx = 0;
    for (size_t i = 0; i < k; ++i) ctx = (ctx << 1) | x[i];
    const size_t first_word = ctx;

    std::vector<std::array<int64_t, 2>> m(n_ctx, {0, 0});
    for (size_t t = k; t < n; ++t) {
        const uint8_t s = x[t];
        ++m[ctx][s];
        ctx = ((ctx << 1) | s) & mask;
    }
    double lp = ctx_log2_pi_[first_word];
    for (size_t c = 0; c < n_ctx; ++c) {
        lp += static_cast<double>(m[c][0]) * ctx_log2_p0_[c];
        lp += static_cast<double>(m[c][1]) * ctx_log2_p1_[c];
    }
    return lp;
}

double SourceModel::hmm_log_prob(const BitSequence& x) const {
    const size_t S = emit0_.size();
    const size_t n = x.length();
    // Scaled forward recursion from the stationary hidden-state distribution;
    // log2 of the normalizers accumulates to log2 nu(x).
    std::vector<double> a(S), b(S);
    double lp = 0.0;
    for (size_t s = 0; s < S; ++s)
        a[s] = hidden_pi_[s] * (x[0] == 0 ? emit0_[s] : 1.0 - emit0_[s]);
    double norm = 0.0;
    for (double v : a) norm += v;
    lp += std::log2(norm);
    for (double& v : a) v /= norm;

    for (size_t t = 1; t < n; ++t) {
        for (size_t j = 0; j < S; ++j) {
            double acc = 0.0;
            for (size_t i = 0; i < S; ++i) acc += a[i] * trans_[i][j];
            b[j] = acc * (x[t] == 0 ? emit0_[j] : 1.0 - emit0_[j]);
        }
        norm = 0.0;
        for (double v : b) norm += v;
        lp += std::log2(norm);
        for (size_t j = 0; j < S; ++j) a[j] = b[j] / norm;
    }
    return lp;
}

double SourceModel::log_prob(const BitSequence& x) const {
    switch (kind_) {
        case SourceKind::Uniform:
        case SourceKind::Bernoulli:
            return iid_class_log2prob(x.length(), x.count_ones(), p0_);
        case SourceKind::Markov:
            return markov_log_prob(x);
        case SourceKind::HiddenMarkov:
            return hmm_log_prob(x);
    }
    return 0.0;
}

double SourceModel::closed_form_entropy() const {
    switch (kind_) {
        case SourceKind::Uniform:
        case SourceKind::Bernoulli:
            return binary_entropy(p0_);
        case SourceKind::Markov: {
            double h = 0.0;
            for (size_t c = 0; c < ctx_p0_.size(); ++c)
                h += ctx_pi_[c] * binary_entropy(ctx_p0_[c]);
            return h;
        }
        case SourceKind::HiddenMarkov:
            throw std::logic_error("closed_form_entropy: none for hidden Markov");
    }
    return 0.0;
}

EntropyEstimate SourceModel::entropy_rate() const {
    if (kind_ == SourceKind::HiddenMarkov)
        return entropy_rate_smb(65536, 32, kDefaultSmbSeed);
    EntropyEstimate e;
    e.value = closed_form_entropy();
    e.method = EntropyEstimate::Method::ClosedForm;
    return e;
}

EntropyEstimate SourceModel::entropy_rate_smb(size_t n_used, size_t trials, uint64_t seed) const {
    if (n_used < 1 || trials < 2)
        throw std::invalid_argument("entropy_rate_smb: need n_used >= 1 and trials >= 2");
    std::vector<double> v(trials);
    for (size_t i = 0; i < trials; ++i) {
        const BitSequence x = sample(n_used, trial_seed(seed, i));
        v[i] = -log_prob(x) / static_cast<double>(n_used);
    }
    double mean = 0.0;
    for (double t : v) mean += t;
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (double t : v) var += (t - mean) * (t - mean);
    var /= static_cast<double>(trials - 1);

    EntropyEstimate e;
    e.value = std::clamp(mean, 0.0, 1.0);
    e.method = EntropyEstimate::Method::MonteCarloSMB;
    e.ci_halfwidth = 2.0 * std::sqrt(var / static_cast<double>(trials));
    e.n_used = n_used;
    e.trials = trials;
    return e;
}

}  // namespace entropytest
