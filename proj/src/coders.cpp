#include "entropytest/coders.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "entropytest/bigint.hpp"

namespace entropytest {

namespace {

// Integer code length from an accumulated -log2 probability. The sum is
// snapped to a 1e-9 grid before the ceil so that values which are
// mathematically integral cannot round to an off-by-one length.
int64_t ceil_code_bits(double neg_log2_p) {
    const double grid = std::nearbyint(neg_log2_p * 1e9) * 1e-9;
    auto bits = static_cast<int64_t>(std::ceil(grid - 1e-12));
    return bits < 1 ? 1 : bits;
}

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

constexpr double kInvLn2 = std::numbers::log2e;

// log2(2^a / 2 + 2^b / 2) without leaving the log domain.
double log2_half_sum(double a, double b) {
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi - 1.0 + std::log1p(std::exp2(lo - hi)) * kInvLn2;
}

struct CtwNode {
    int32_t child[2] = {-1, -1};
    uint32_t count[2] = {0, 0};
    double log_pe = 0.0;   // KT estimate of this node's subsequence
    double pe_comp = 0.0;  // compensation term for log_pe
    double log_pw = 0.0;   // weighted mixture of this subtree
};

}  // namespace

int64_t lz78_code_length(const BitSequence& x) {
    // Dictionary trie; node 0 is the empty phrase.
    struct TrieNode {
        int32_t child[2] = {-1, -1};
    };
    std::vector<TrieNode> trie(1);
    trie.reserve(x.length() / 2 + 2);

    int64_t total = 0;
    int64_t complete = 0;  // phrases emitted so far
    int32_t node = 0;
    for (size_t t = 0; t < x.length(); ++t) {
        const int b = x[t];
        const int32_t next = trie[static_cast<size_t>(node)].child[b];
        if (next >= 0) {
            node = next;  // phrase still matches the dictionary
            continue;
        }
        // New phrase = current dictionary entry extended by b.
        trie[static_cast<size_t>(node)].child[b] = static_cast<int32_t>(trie.size());
        trie.emplace_back();
        ++complete;
        total += ceil_log2_u64(static_cast<uint64_t>(complete)) + 1;
        node = 0;
    }
    if (node != 0) {
        // Trailing incomplete phrase: index among the c+1 dictionary entries.
        total += ceil_log2_u64(static_cast<uint64_t>(complete) + 1);
    }
    return total < 1 ? 1 : total;
}

int64_t kt_code_length(const BitSequence& x) {
    CompensatedSum neg_log2;
    uint64_t count[2] = {0, 0};
    for (size_t t = 0; t < x.length(); ++t) {
        const int b = x[t];
        const double f =
            (static_cast<double>(count[b]) + 0.5) / (static_cast<double>(t) + 1.0);
        neg_log2.add(-std::log2(f));
        ++count[b];
    }
    return ceil_code_bits(neg_log2.value());
}

CtwCoder::CtwCoder(int depth) : depth_(depth) {
    if (depth < 0 || depth > 24)
        throw std::invalid_argument("ctw: depth must be in [0, 24]");
}

std::string CtwCoder::id() const { return "ctw:D=" + std::to_string(depth_); }

int64_t CtwCoder::code_length(const BitSequence& x) const {
    const int D = depth_;
    if (D == 0) return kt_code_length(x);

    const size_t n = x.length();
    std::vector<CtwNode> pool(1);
    pool.reserve(std::min<size_t>(n * static_cast<size_t>(D + 1) + 1,
                                  (size_t{2} << D)));
    std::vector<int32_t> path(static_cast<size_t>(D) + 1);

    for (size_t t = 0; t < n; ++t) {
        const int b = x[t];
        // Walk root -> leaf along the context (most recent symbol first);
        // positions before the start read as zeros.
        path[0] = 0;
        for (int d = 1; d <= D; ++d) {
            const int c = t >= static_cast<size_t>(d) ? x[t - static_cast<size_t>(d)] : 0;
            int32_t& slot = pool[static_cast<size_t>(path[d - 1])].child[c];
            if (slot < 0) {
                slot = static_cast<int32_t>(pool.size());
                pool.emplace_back();
            }
            path[static_cast<size_t>(d)] = slot;
        }
        // Update leaf to root. Absent subtrees have weighted probability 1.
        for (int d = D; d >= 0; --d) {
            CtwNode& node = pool[static_cast<size_t>(path[d])];
            const double f = (static_cast<double>(node.count[b]) + 0.5) /
                             (static_cast<double>(node.count[0]) +
                              static_cast<double>(node.count[1]) + 1.0);
            // compensated accumulation of log_pe
            {
                const double v = std::log2(f);
                const double s = node.log_pe + v;
                if (std::abs(node.log_pe) >= std::abs(v))
                    node.pe_comp += (node.log_pe - s) + v;
                else
                    node.pe_comp += (v - s) + node.log_pe;
                node.log_pe = s;
            }
            ++node.count[b];
            const double pe = node.log_pe + node.pe_comp;
            if (d == D) {
                node.log_pw = pe;
            } else {
                double children = 0.0;
                for (int c = 0; c < 2; ++c) {
                    const int32_t ch = node.child[c];
                    if (ch >= 0) children += pool[static_cast<size_t>(ch)].log_pw;
                }
                node.log_pw = log2_half_sum(pe, children);
            }
        }
    }
    return ceil_code_bits(-pool[0].log_pw);
}

int64_t ctw_code_length(const BitSequence& x, int depth) {
    return CtwCoder(depth).code_length(x);
}

int64_t type2p_code_length(const BitSequence& x) {
    const auto n = static_cast<int64_t>(x.length());
    const auto k = static_cast<int64_t>(x.count_ones());
    const int64_t header = ceil_log2_u64(static_cast<uint64_t>(n) + 1);
    const BigInt cls = binomial(n, k);
    return header + ceil_log2_big(cls);
}

BestOfCoder::BestOfCoder(std::vector<std::unique_ptr<Coder>> coders)
    : coders_(std::move(coders)) {
    if (coders_.empty()) throw std::invalid_argument("best: empty coder list");
}

int64_t BestOfCoder::code_length(const BitSequence& x) const {
    int64_t best = coders_[0]->code_length(x);
    for (size_t i = 1; i < coders_.size(); ++i)
        best = std::min(best, coders_[i]->code_length(x));
    return ceil_log2_u64(coders_.size()) + best;
}

std::string BestOfCoder::id() const {
    std::string s = "best:";
    for (size_t i = 0; i < coders_.size(); ++i) {
        if (i) s += ',';
        s += coders_[i]->id();
    }
    return s;
}

int64_t best_code_length(const BitSequence& x, const std::vector<const Coder*>& coders) {
    if (coders.empty()) throw std::invalid_argument("best: empty coder list");
    int64_t best = coders[0]->code_length(x);
    for (size_t i = 1; i < coders.size(); ++i)
        best = std::min(best, coders[i]->code_length(x));
    return ceil_log2_u64(coders.size()) + best;
}

std::unique_ptr<Coder> make_coder(const std::string& spec) {
    if (spec == "lz78") return std::make_unique<Lz78Coder>();
    if (spec == "kt") return std::make_unique<KtCoder>();
    if (spec == "type2p") return std::make_unique<Type2pCoder>();
    if (spec == "ctw") return std::make_unique<CtwCoder>(8);
    if (spec.rfind("ctw:D=", 0) == 0) {
        const std::string num = spec.substr(6);
        size_t pos = 0;
        int d = 0;
        try {
            d = std::stoi(num, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("coder: bad ctw depth in '" + spec + "'");
        }
        if (pos != num.size()) throw std::invalid_argument("coder: bad ctw depth in '" + spec + "'");
        return std::make_unique<CtwCoder>(d);
    }
    if (spec.rfind("best:", 0) == 0) {
        std::vector<std::unique_ptr<Coder>> parts;
        const std::string list = spec.substr(5);
        for (size_t start = 0; start <= list.size();) {
            size_t comma = list.find(',', start);
            if (comma == std::string::npos) comma = list.size();
            const std::string item = list.substr(start, comma - start);
            if (item.empty()) throw std::invalid_argument("coder: empty entry in '" + spec + "'");
            if (item.rfind("best:", 0) == 0)
                throw std::invalid_argument("coder: best cannot nest");
            parts.push_back(make_coder(item));
            start = comma + 1;
        }
        return std::make_unique<BestOfCoder>(std::move(parts));
    }
    throw std::invalid_argument("coder: unknown spec '" + spec + "'");
}

}  // namespace entropytest
