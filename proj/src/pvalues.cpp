#include "entropytest/pvalues.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>

#include "entropytest/parallel.hpp"

namespace entropytest {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie strictly inside (0,1)");
}

PValue make_exact_pvalue(BigInt numerator, size_t n, PvMethod method, std::string label) {
    if (numerator < 1) throw std::logic_error("exact p-value numerator must be >= 1");
    PValue p;
    p.method = method;
    p.label = std::move(label);
    p.n = static_cast<int64_t>(n);
    p.numerator = std::move(numerator);
    p.log2_value = log2_big(p.numerator) - static_cast<double>(n);
    p.value = std::exp2(p.log2_value);
    return p;
}

}  // namespace

StatisticFn coder_tau_fn(const Coder& coder) {
    return [&coder](const BitSequence& y) {
        return static_cast<double>(y.length()) - static_cast<double>(coder.code_length(y));
    };
}

StatisticFn np_logprob_fn(const SourceModel& model) {
    return [&model](const BitSequence& y) { return model.log_prob(y); };
}

Statistic tau_statistic(const Coder& coder, const BitSequence& x) {
    Statistic s;
    s.kind = StatKind::CoderTau;
    s.value = static_cast<double>(static_cast<int64_t>(x.length()) - coder.code_length(x));
    return s;
}

Decision decide_from_tau(double tau, double alpha) {
    check_alpha(alpha);
    return tau >= -std::log2(alpha) ? Decision::Reject : Decision::Accept;
}

Decision decide(const Coder& coder, const BitSequence& x, double alpha) {
    return decide_from_tau(tau_statistic(coder, x).value, alpha);
}

PValue pvalue_kraft_bound(const Statistic& tau) {
    if (tau.kind != StatKind::CoderTau)
        throw std::invalid_argument("pvalue_kraft_bound: needs a coder tau statistic");
    PValue p;
    p.method = PvMethod::KraftBound;
    p.label = "bound";
    p.log2_value = tau.value > 0.0 ? -tau.value : 0.0;  // min(1, 2^-tau)
    p.value = std::exp2(p.log2_value);
    return p;
}

PValue pvalue_exact_enum(const StatisticFn& stat, const BitSequence& x, size_t n_limit) {
    const size_t n = x.length();
    if (n_limit > 63) n_limit = 63;
    if (n > n_limit)
        throw std::invalid_argument(
            "pvalue_exact_enum: n = " + std::to_string(n) + " exceeds the enumeration limit " +
            std::to_string(n_limit) + "; use Monte Carlo (mc:M=...) instead");

    const double sx = stat(x);
    const uint64_t total = uint64_t{1} << n;
    const int nbits = static_cast<int>(n);
    const uint64_t count = parallel_count(0, total, [&](uint64_t y) {
        return stat(BitSequence::from_word(y, nbits)) >= sx;
    });
    PValue p = make_exact_pvalue(BigInt(count), n, PvMethod::ExactEnumeration, "exact");
    return p;
}

PValue np_pvalue_iid(double p0, const BitSequence& x) {
    if (!(p0 > 0.0 && p0 < 1.0))
        throw std::invalid_argument("np_pvalue_iid: p0 must lie strictly inside (0,1)");
    const size_t n = x.length();
    const uint64_t kx = x.count_ones();
    const double lpx = SourceModel::iid_class_log2prob(n, kx, p0);

    BigInt numerator = 0;
    BigInt binom = 1;  // C(n, 0)
    for (uint64_t k = 0; k <= n; ++k) {
        if (SourceModel::iid_class_log2prob(n, k, p0) >= lpx) numerator += binom;
        if (k < n) {
            binom *= static_cast<int64_t>(n - k);
            binom /= static_cast<int64_t>(k + 1);
        }
    }
    return make_exact_pvalue(std::move(numerator), n, PvMethod::TypeClassExact, "np-iid");
}

PValue np_pvalue_markov(const SourceModel& model, const BitSequence& x, size_t n_limit) {
    if (model.kind() != SourceKind::Markov || model.order() != 1)
        throw std::invalid_argument("np_pvalue_markov: model must be Markov of order 1");
    const size_t n = x.length();
    if (n > n_limit)
        throw std::invalid_argument("np_pvalue_markov: n = " + std::to_string(n) +
                                    " exceeds the type-class limit " + std::to_string(n_limit));

    // nu(y) depends only on (first symbol, transition counts). A class is
    // parameterized by the run structure: a = first symbol, n0 = #zeros,
    // r = #zero-runs, s = #one-runs (runs alternate, so |r - s| <= 1 and the
    // first run's symbol is a). It holds C(n0-1, r-1) * C(n1-1, s-1)
    // sequences: compositions of the zeros and ones into their runs.
    int64_t cnt[2][2] = {{0, 0}, {0, 0}};
    for (size_t t = 1; t < n; ++t) ++cnt[x[t - 1]][x[t]];
    const double lpx =
        model.markov1_class_log2prob(x[0], cnt[0][0], cnt[0][1], cnt[1][0], cnt[1][1]);

    // Pascal triangle rows 0 .. n-1.
    std::vector<std::vector<BigInt>> choose(n);
    for (size_t i = 0; i < n; ++i) {
        choose[i].resize(i + 1);
        choose[i][0] = 1;
        for (size_t j = 1; j <= i; ++j)
            choose[i][j] = choose[i - 1][j - 1] + (j < i ? choose[i - 1][j] : BigInt(0));
    }

    BigInt numerator = 0;
    const auto in = static_cast<int64_t>(n);
    for (int a = 0; a < 2; ++a) {
        for (int64_t n0 = 0; n0 <= in; ++n0) {
            const int64_t n1 = in - n0;
            if (n0 == 0) {
                if (a != 1) continue;
                const double lp = model.markov1_class_log2prob(1, 0, 0, 0, n1 - 1);
                if (lp >= lpx) numerator += 1;
                continue;
            }
            if (n1 == 0) {
                if (a != 0) continue;
                const double lp = model.markov1_class_log2prob(0, n0 - 1, 0, 0, 0);
                if (lp >= lpx) numerator += 1;
                continue;
            }
            for (int64_t r = 1; r <= n0; ++r) {
                for (int ds = -1; ds <= 0; ++ds) {
                    // a == 0: s in {r-1, r}; a == 1: s in {r, r+1}
                    const int64_t s = a == 0 ? r + ds : r - ds;
                    if (s < 1 || s > n1) continue;
                    const int64_t n01 = a == 0 ? s : s - 1;
                    const int64_t n10 = a == 0 ? r - 1 : r;
                    const int64_t n00 = n0 - r;
                    const int64_t n11 = n1 - s;
                    const double lp = model.markov1_class_log2prob(a, n00, n01, n10, n11);
                    if (lp < lpx) continue;
                    numerator += choose[static_cast<size_t>(n0 - 1)][static_cast<size_t>(r - 1)] *
                                 choose[static_cast<size_t>(n1 - 1)][static_cast<size_t>(s - 1)];
                }
            }
        }
    }
    return make_exact_pvalue(std::move(numerator), n, PvMethod::TypeClassExact, "np-markov");
}

PValue pvalue_monte_carlo(const StatisticFn& stat, const BitSequence& x, uint64_t trials,
                          uint64_t seed) {
    if (trials < 100) throw std::invalid_argument("pvalue_monte_carlo: need at least 100 trials");
    const size_t n = x.length();
    const double sx = stat(x);
    const SourceModel uniform = SourceModel::uniform();

    const uint64_t r = parallel_count(0, trials, [&](uint64_t i) {
        return stat(uniform.sample(n, trial_seed(seed, i))) >= sx;
    });

    PValue p;
    p.method = PvMethod::MonteCarlo;
    p.label = "mc:M=" + std::to_string(trials);
    p.n = static_cast<int64_t>(n);
    p.trials = trials;
    p.exceed_count = r;
    p.value = static_cast<double>(r + 1) / static_cast<double>(trials + 1);
    p.log2_value = std::log2(p.value);
    // 99% Clopper-Pearson interval for the exceed probability r/M.
    using boost::math::binomial_distribution;
    const auto m = static_cast<double>(trials);
    const auto rr = static_cast<double>(r);
    p.ci_low = r == 0 ? 0.0 : binomial_distribution<>::find_lower_bound_on_p(m, rr, 0.005);
    p.ci_high = r == trials ? 1.0 : binomial_distribution<>::find_upper_bound_on_p(m, rr, 0.005);
    return p;
}

uint64_t required_sample_size(double alpha, double h) {
    check_alpha(alpha);
    if (!(h >= 0.0)) throw std::invalid_argument("required_sample_size: h must be in [0,1)");
    if (h >= 1.0)
        throw std::domain_error("required_sample_size: h >= 1, source indistinguishable at any n");
    const double q = -std::log2(alpha) / (1.0 - h);
    if (!(q < 9.0e18)) throw std::overflow_error("required_sample_size: bound exceeds 64 bits");
    return static_cast<uint64_t>(std::floor(q)) + 1;  // smallest integer strictly above q
}

std::string PvMethodSpec::name() const {
    switch (kind) {
        case Kind::Bound: return "bound";
        case Kind::Exact: return "exact";
        case Kind::MonteCarlo: return "mc:M=" + std::to_string(mc_trials);
        case Kind::NpIid: return "np-iid";
        case Kind::NpMarkov: return "np-markov";
    }
    return "?";
}

PvMethodSpec parse_pvalue_method(const std::string& s) {
    PvMethodSpec spec;
    if (s == "bound") {
        spec.kind = PvMethodSpec::Kind::Bound;
    } else if (s == "exact") {
        spec.kind = PvMethodSpec::Kind::Exact;
    } else if (s == "np-iid") {
        spec.kind = PvMethodSpec::Kind::NpIid;
    } else if (s == "np-markov") {
        spec.kind = PvMethodSpec::Kind::NpMarkov;
    } else if (s == "mc" || s.rfind("mc:M=", 0) == 0) {
        spec.kind = PvMethodSpec::Kind::MonteCarlo;
        if (s != "mc") {
            const std::string num = s.substr(5);
            size_t pos = 0;
            unsigned long long m = 0;
            try {
                m = std::stoull(num, &pos);
            } catch (const std::exception&) {
                throw std::invalid_argument("pvalue method: bad trial count in '" + s + "'");
            }
            if (pos != num.size() || m == 0)
                throw std::invalid_argument("pvalue method: bad trial count in '" + s + "'");
            spec.mc_trials = m;
        }
    } else {
        throw std::invalid_argument("pvalue method: unknown spec '" + s +
                                    "' (expected exact, mc:M=..., bound, np-iid, np-markov)");
    }
    return spec;
}

TestReport run_coder_test(const Coder& coder, const BitSequence& x, double alpha,
                          const std::vector<PvMethodSpec>& methods, uint64_t seed) {
    check_alpha(alpha);
    TestReport rep;
    rep.coder_id = coder.id();
    rep.n = x.length();
    rep.code_length = coder.code_length(x);
    rep.statistic.kind = StatKind::CoderTau;
    rep.statistic.value = static_cast<double>(static_cast<int64_t>(rep.n) - rep.code_length);
    rep.alpha = alpha;
    rep.decision = decide_from_tau(rep.statistic.value, alpha);

    const StatisticFn fn = coder_tau_fn(coder);
    for (const auto& m : methods) {
        switch (m.kind) {
            case PvMethodSpec::Kind::Bound:
                rep.pvalues.push_back(pvalue_kraft_bound(rep.statistic));
                break;
            case PvMethodSpec::Kind::Exact:
                rep.pvalues.push_back(pvalue_exact_enum(fn, x));
                break;
            case PvMethodSpec::Kind::MonteCarlo:
                rep.pvalues.push_back(pvalue_monte_carlo(fn, x, m.mc_trials, seed));
                break;
            case PvMethodSpec::Kind::NpIid:
            case PvMethodSpec::Kind::NpMarkov:
                throw std::invalid_argument(
                    "run_coder_test: np-* p-values need a source model; use the pvalue command");
        }
    }
    if (rep.pvalues.empty()) rep.pvalues.push_back(pvalue_kraft_bound(rep.statistic));
    rep.exponent = -rep.pvalues.front().log2_value / static_cast<double>(rep.n);
    return rep;
}

}  // namespace entropytest
