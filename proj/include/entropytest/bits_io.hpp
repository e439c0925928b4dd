#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "entropytest/bit_sequence.hpp"
#include "entropytest/experiments.hpp"
#include "entropytest/source_model.hpp"

namespace entropytest {

// Bit-stream encodings understood by the CLI.
//   raw:     bytes, most-significant bit first
//   ascii01: '0'/'1' characters, whitespace ignored
//   hex:     hex digits, each nibble MSB-first, whitespace ignored
enum class BitFormat { Raw, Ascii01, Hex };

BitFormat parse_bit_format(const std::string& s);
std::string bit_format_name(BitFormat f);

struct InputSpec {
    std::string path = "-";  // "-" = stdin
    BitFormat format = BitFormat::Raw;
    std::optional<uint64_t> max_bits;  // truncate after this many bits
};

BitSequence decode_bits(std::string_view data, BitFormat format,
                        std::optional<uint64_t> max_bits = std::nullopt);

// Reads the file (or stdin) named by the spec and decodes it. Throws
// std::runtime_error for I/O problems, std::invalid_argument for bad content.
BitSequence read_bits(const InputSpec& spec);

// Writes the sequence in the given format. Raw output pads the final partial
// byte with low zero bits; pass the bit count out of band (e.g. --max-bits)
// to recover non-byte-aligned lengths exactly.
void write_bits(std::ostream& os, const BitSequence& x, BitFormat format);

// Flat key=value files ('#' comments and blank lines allowed; no repeats).
std::map<std::string, std::string> read_kv_file(const std::string& path);
std::map<std::string, std::string> parse_kv_text(std::string_view text);

// Model description, e.g.
//   kind=markov
//   order=1
//   p0_ctx0=0.9
//   p0_ctx1=0.5
// Context index reads the last k symbols as a binary number, oldest symbol
// first (most recent symbol = least significant bit). Hidden Markov models
// use states=S, a_<i>_<j> (transition i->j) and b_<i> (P(emit 0 | state i)).
SourceModel model_from_kv(const std::map<std::string, std::string>& kv);
SourceModel load_model_file(const std::string& path);

// Experiment config: the model keys above plus
//   experiment=convergence|decimation|type1|power
//   method=np|<coder spec>      pvalue=bound|exact|mc:M=...
//   n_grid=256,1024,4096        trials=100   seed=1
//   alpha=0.01 (power)          alphas=0.01,0.05 (type1)
//   out=path/prefix
ExperimentConfig experiment_config_from_kv(const std::map<std::string, std::string>& kv);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace entropytest
