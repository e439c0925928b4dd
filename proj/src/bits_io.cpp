#include "entropytest/bits_io.hpp"

#include <cctype>
#include <fstream>
#include <iostream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace entropytest {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

uint64_t parse_u64(const std::string& key, const std::string& s) {
    size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": bad integer '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument(key + ": bad integer '" + s + "'");
    return v;
}

double parse_f64(const std::string& key, const std::string& s) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": bad number '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument(key + ": bad number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

// Lookup helpers that consume keys from a working copy, so leftovers can be
// reported as unknown.
class KvReader {
public:
    explicit KvReader(const std::map<std::string, std::string>& kv) : kv_(kv) {}

    std::optional<std::string> take(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        std::string v = it->second;
        kv_.erase(it);
        return v;
    }

    std::string require(const std::string& key) {
        auto v = take(key);
        if (!v) throw std::invalid_argument("missing key '" + key + "'");
        return *v;
    }

    void finish() const {
        if (!kv_.empty())
            throw std::invalid_argument("unknown key '" + kv_.begin()->first + "'");
    }

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace

BitFormat parse_bit_format(const std::string& s) {
    if (s == "raw") return BitFormat::Raw;
    if (s == "ascii01") return BitFormat::Ascii01;
    if (s == "hex") return BitFormat::Hex;
    throw std::invalid_argument("format: expected raw, ascii01 or hex, got '" + s + "'");
}

std::string bit_format_name(BitFormat f) {
    switch (f) {
        case BitFormat::Raw: return "raw";
        case BitFormat::Ascii01: return "ascii01";
        case BitFormat::Hex: return "hex";
    }
    return "?";
}

BitSequence decode_bits(std::string_view data, BitFormat format,
                        std::optional<uint64_t> max_bits) {
    if (max_bits && *max_bits == 0)
        throw std::invalid_argument("max_bits: must be >= 1");
    std::vector<uint8_t> bits;
    const uint64_t limit = max_bits ? *max_bits : UINT64_MAX;

    switch (format) {
        case BitFormat::Raw: {
            bits.reserve(std::min<uint64_t>(limit, data.size() * 8));
            for (unsigned char byte : data) {
                for (int i = 7; i >= 0 && bits.size() < limit; --i)
                    bits.push_back(static_cast<uint8_t>((byte >> i) & 1u));
                if (bits.size() >= limit) break;
            }
            break;
        }
        case BitFormat::Ascii01: {
            for (char c : data) {
                if (is_space(c)) continue;
                if (c != '0' && c != '1')
                    throw std::invalid_argument("ascii01 input: unexpected character");
                if (bits.size() < limit) bits.push_back(static_cast<uint8_t>(c - '0'));
                if (bits.size() >= limit) break;
            }
            break;
        }
        case BitFormat::Hex: {
            for (char c : data) {
                if (is_space(c)) continue;
                const int v = hex_digit(c);
                if (v < 0) throw std::invalid_argument("hex input: unexpected character");
                for (int i = 3; i >= 0 && bits.size() < limit; --i)
                    bits.push_back(static_cast<uint8_t>((v >> i) & 1u));
                if (bits.size() >= limit) break;
            }
            break;
        }
    }
    if (bits.empty()) throw std::invalid_argument("input: decoded bit count is zero");
    return BitSequence(std::move(bits));
}

BitSequence read_bits(const InputSpec& spec) {
    std::string data;
    if (spec.path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        data = ss.str();
    } else {
        std::ifstream f(spec.path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open input file '" + spec.path + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        data = ss.str();
    }
    return decode_bits(data, spec.format, spec.max_bits);
}

void write_bits(std::ostream& os, const BitSequence& x, BitFormat format) {
    switch (format) {
        case BitFormat::Raw: {
            uint8_t byte = 0;
            int filled = 0;
            for (size_t i = 0; i < x.length(); ++i) {
                byte = static_cast<uint8_t>((byte << 1) | x[i]);
                if (++filled == 8) {
                    os.put(static_cast<char>(byte));
                    byte = 0;
                    filled = 0;
                }
            }
            if (filled > 0) os.put(static_cast<char>(byte << (8 - filled)));
            break;
        }
        case BitFormat::Ascii01: {
            os << x.to_string() << '\n';
            break;
        }
        case BitFormat::Hex: {
            static const char digits[] = "0123456789abcdef";
            int nibble = 0, filled = 0;
            for (size_t i = 0; i < x.length(); ++i) {
                nibble = (nibble << 1) | x[i];
                if (++filled == 4) {
                    os.put(digits[nibble]);
                    nibble = 0;
                    filled = 0;
                }
            }
            if (filled > 0) os.put(digits[nibble << (4 - filled)]);
            os << '\n';
            break;
        }
    }
}

std::map<std::string, std::string> parse_kv_text(std::string_view text) {
    std::map<std::string, std::string> kv;
    size_t line_no = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;

        // trim
        while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
        while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
        if (line.empty() || line.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected key=value");
        std::string key(line.substr(0, eq));
        std::string value(line.substr(eq + 1));
        while (!key.empty() && is_space(key.back())) key.pop_back();
        size_t vs = 0;
        while (vs < value.size() && is_space(value[vs])) ++vs;
        value.erase(0, vs);
        if (key.empty())
            throw std::invalid_argument("line " + std::to_string(line_no) + ": empty key");
        if (!kv.emplace(key, value).second)
            throw std::invalid_argument("duplicate key '" + key + "'");
        if (end == text.size()) break;
    }
    return kv;
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_kv_text(ss.str());
}

SourceModel model_from_kv(const std::map<std::string, std::string>& kv) {
    KvReader r(kv);
    const std::string kind = r.require("kind");
    if (kind == "uniform") {
        r.finish();
        return SourceModel::uniform();
    }
    if (kind == "bernoulli") {
        const double p0 = parse_f64("p0", r.require("p0"));
        r.finish();
        return SourceModel::bernoulli(p0);
    }
    if (kind == "markov") {
        const auto order = static_cast<int>(parse_u64("order", r.require("order")));
        if (order < 0 || order > 20) throw std::invalid_argument("order: out of range");
        const size_t n_ctx = size_t{1} << order;
        std::vector<double> table(n_ctx);
        for (size_t c = 0; c < n_ctx; ++c) {
            const std::string key = "p0_ctx" + std::to_string(c);
            table[c] = parse_f64(key, r.require(key));
        }
        r.finish();
        return SourceModel::markov(order, table);
    }
    if (kind == "hmm") {
        const auto S = static_cast<size_t>(parse_u64("states", r.require("states")));
        if (S < 1 || S > 64) throw std::invalid_argument("states: out of range");
        std::vector<std::vector<double>> A(S, std::vector<double>(S));
        std::vector<double> B(S);
        for (size_t i = 0; i < S; ++i) {
            for (size_t j = 0; j < S; ++j) {
                const std::string key = "a_" + std::to_string(i) + "_" + std::to_string(j);
                A[i][j] = parse_f64(key, r.require(key));
            }
            const std::string key = "b_" + std::to_string(i);
            B[i] = parse_f64(key, r.require(key));
        }
        r.finish();
        return SourceModel::hidden_markov(A, B);
    }
    throw std::invalid_argument("kind: expected uniform, bernoulli, markov or hmm, got '" + kind +
                                "'");
}

SourceModel load_model_file(const std::string& path) {
    return model_from_kv(read_kv_file(path));
}

ExperimentConfig experiment_config_from_kv(const std::map<std::string, std::string>& kv) {
    // Pull the experiment-level keys out, then hand the rest to the model
    // parser so model descriptions embed directly in config files.
    std::map<std::string, std::string> model_kv = kv;
    auto take = [&model_kv](const std::string& key) -> std::optional<std::string> {
        auto it = model_kv.find(key);
        if (it == model_kv.end()) return std::nullopt;
        std::string v = it->second;
        model_kv.erase(it);
        return v;
    };

    ExperimentConfig cfg;
    auto exp = take("experiment");
    if (!exp) throw std::invalid_argument("missing key 'experiment'");
    cfg.experiment = *exp;

    if (auto method = take("method")) cfg.coder_spec = *method == "np" ? "" : *method;
    if (auto pv = take("pvalue")) cfg.pvalue = parse_pvalue_method(*pv);

    auto grid = take("n_grid");
    if (!grid) grid = take("n");
    if (!grid) throw std::invalid_argument("missing key 'n_grid'");
    for (const std::string& part : split(*grid, ',')) {
        const uint64_t v = parse_u64("n_grid", part);
        if (v < 1) throw std::invalid_argument("n_grid: lengths must be >= 1");
        cfg.n_grid.push_back(static_cast<size_t>(v));
    }

    auto trials = take("trials");
    if (!trials) throw std::invalid_argument("missing key 'trials'");
    cfg.trials = static_cast<size_t>(parse_u64("trials", *trials));
    if (cfg.trials < 1) throw std::invalid_argument("trials: must be >= 1");

    if (auto seed = take("seed")) cfg.seed = parse_u64("seed", *seed);
    if (auto alpha = take("alpha")) cfg.alpha = parse_f64("alpha", *alpha);
    if (auto alphas = take("alphas"))
        for (const std::string& part : split(*alphas, ','))
            cfg.alphas.push_back(parse_f64("alphas", part));
    if (auto out = take("out")) cfg.out_prefix = *out;

    cfg.model = model_from_kv(model_kv);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return experiment_config_from_kv(read_kv_file(path));
}

}  // namespace entropytest
