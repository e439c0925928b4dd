#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "entropytest/bit_sequence.hpp"

namespace entropytest {

// A Kraft-compliant lossless code length |phi(x)| in whole bits. Lengths are
// all a compression test consumes, so no bitstream is ever materialized;
// decodability is evidenced by the exhaustive Kraft checks in the tests.
// code_length is a pure function of (x, parameters) and per-call state only,
// so coders are safe to share across threads.
class Coder {
public:
    virtual ~Coder() = default;
    virtual int64_t code_length(const BitSequence& x) const = 0;  // >= 1
    virtual std::string id() const = 0;
};

// Cost of the LZ78 incremental parse. Complete phrase i (which extends one of
// the i prior dictionary entries, empty phrase included, by one symbol) costs
// ceil(log2 i) + 1 bits; a trailing incomplete phrase costs ceil(log2(c+1))
// bits of index only, c = number of complete phrases.
int64_t lz78_code_length(const BitSequence& x);

// ceil(-log2 P_KT(x)) for the Krichevsky-Trofimov estimator
// P_KT(x) = prod_t (count_{x_{t+1}}(x_1..x_t) + 1/2) / (t + 1).
int64_t kt_code_length(const BitSequence& x);

// ceil(-log2 P_CTW(x)) for the binary context-tree-weighting mixture over
// tree sources of depth <= D, weight 1/2 at every internal node, KT
// estimators at the nodes, initial context fixed to D zeros. D = 0 equals
// kt_code_length exactly.
int64_t ctw_code_length(const BitSequence& x, int depth);

// Two-part type code: ceil(log2(n+1)) bits for k = #ones, then
// ceil(log2 C(n,k)) bits for the index of x inside its type class.
int64_t type2p_code_length(const BitSequence& x);

// ceil(log2 m) header naming the winning coder + the minimum length. Kraft
// compliance survives by the union bound. Throws on an empty list.
int64_t best_code_length(const BitSequence& x, const std::vector<const Coder*>& coders);

class Lz78Coder final : public Coder {
public:
    int64_t code_length(const BitSequence& x) const override { return lz78_code_length(x); }
    std::string id() const override { return "lz78"; }
};

class KtCoder final : public Coder {
public:
    int64_t code_length(const BitSequence& x) const override { return kt_code_length(x); }
    std::string id() const override { return "kt"; }
};

class CtwCoder final : public Coder {
public:
    explicit CtwCoder(int depth);
    int64_t code_length(const BitSequence& x) const override;
    std::string id() const override;
    int depth() const { return depth_; }

private:
    int depth_;
};

class Type2pCoder final : public Coder {
public:
    int64_t code_length(const BitSequence& x) const override { return type2p_code_length(x); }
    std::string id() const override { return "type2p"; }
};

class BestOfCoder final : public Coder {
public:
    explicit BestOfCoder(std::vector<std::unique_ptr<Coder>> coders);
    int64_t code_length(const BitSequence& x) const override;
    std::string id() const override;

private:
    std::vector<std::unique_ptr<Coder>> coders_;
};

// Coder selection grammar used by CLI flags and experiment configs:
//   "lz78" | "kt" | "ctw" | "ctw:D=<int>" | "type2p" | "best:<spec>,<spec>,..."
// Plain "ctw" means D = 8. Throws std::invalid_argument on anything else.
std::unique_ptr<Coder> make_coder(const std::string& spec);

}  // namespace entropytest
