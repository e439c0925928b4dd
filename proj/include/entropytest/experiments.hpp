#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "entropytest/bit_sequence.hpp"
#include "entropytest/coders.hpp"
#include "entropytest/pvalues.hpp"
#include "entropytest/source_model.hpp"

namespace entropytest {

// One trial outcome, one CSV row. `exponent` is -(1/n) log2(pvalue), the
// quantity whose limit is 1 - h(nu); `target` is that limit for the row's
// test (halved for decimated rows).
struct RecordRow {
    std::string experiment;
    std::string method;
    std::string model;
    size_t n = 0;
    size_t trial = 0;
    uint64_t seed = 0;
    double statistic = 0.0;
    double log2_pvalue = 0.0;
    std::string pvalue_method;
    double exponent = 0.0;
    double target = 0.0;
    double abs_gap = 0.0;
};

struct SummaryRow {
    size_t n = 0;
    double mean_exponent = 0.0;
    double std_error = 0.0;
    double target = 0.0;
};

// What gets applied to each sampled sequence: the exact likelihood (NP) test
// when coder == nullptr, otherwise the compression test with the stated
// p-value method.
struct TestMethod {
    const Coder* coder = nullptr;
    PvMethodSpec pvalue;

    std::string name() const { return coder ? coder->id() : "np"; }
};

struct ExperimentConfig {
    std::string experiment;  // convergence | decimation | type1 | power
    SourceModel model = SourceModel::uniform();
    std::string coder_spec;  // empty -> NP method
    PvMethodSpec pvalue;     // coder methods only
    std::vector<size_t> n_grid;
    size_t trials = 0;
    uint64_t seed = 0;
    std::vector<double> alphas;  // type1
    double alpha = 0.01;         // power
    std::string out_prefix;
};

struct ConvergenceResult {
    std::vector<RecordRow> records;
    std::vector<SummaryRow> summary;
};

struct DecimationResult {
    std::vector<RecordRow> records;
    size_t n = 0;
    size_t trials = 0;
    double mean_full = 0.0, se_full = 0.0;
    double mean_dec = 0.0, se_dec = 0.0;
    double ratio = 0.0;     // NaN when both exponents vanish (uniform source)
    double ratio_se = 0.0;  // jackknife over trials
};

struct Type1Result {
    struct Rate {
        double alpha = 0.0;
        uint64_t rejections = 0;
        double rate = 0.0;
        double ci99_high = 1.0;  // one-sided 99% Clopper-Pearson upper bound
    };
    std::vector<RecordRow> records;
    std::vector<Rate> rates;
    size_t n = 0;
    size_t trials = 0;
};

struct PowerResult {
    struct Rate {
        size_t n = 0;
        uint64_t rejections = 0;
        double rate = 0.0;
    };
    std::vector<RecordRow> records;
    std::vector<Rate> rates;
    double alpha = 0.0;
    size_t trials = 0;
};

// Odd-indexed subsequence x_1 x_3 x_5 ...; length floor((n+1)/2). Requires
// n >= 2.
BitSequence decimate(const BitSequence& x);

// Samples `trials` sequences of each length in n_grid from the model,
// computes a p-value per sequence and summarizes the exponents per length.
// Trial t of any length runs on seed + t; reruns are bit-identical.
ConvergenceResult convergence_run(const SourceModel& model, const TestMethod& method,
                                  const std::vector<size_t>& n_grid, size_t trials,
                                  uint64_t seed);

// Applies the method to each sample and to its decimation, both exponents
// normalized by the original n, and reports the ratio of mean exponents.
// Requires an i.i.d. model (uniform or Bernoulli).
DecimationResult decimation_experiment(const SourceModel& model, const TestMethod& method,
                                       size_t n, size_t trials, uint64_t seed);

// Empirical rejection rate of the compression test under the null, per alpha.
// Requires trials >= 1000.
Type1Result type1_calibration(const Coder& coder, const std::vector<double>& alphas, size_t n,
                              size_t trials, uint64_t seed);

// Rejection rate against the model per length in n_grid.
PowerResult power_run(const Coder& coder, const SourceModel& model, double alpha,
                      const std::vector<size_t>& n_grid, size_t trials, uint64_t seed);

// CSV emission. Headers are fixed; identical inputs produce byte-identical
// output.
void write_records_csv(std::ostream& os, const std::vector<RecordRow>& rows);
void write_convergence_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
void write_decimation_summary_csv(std::ostream& os, const DecimationResult& res);
void write_type1_summary_csv(std::ostream& os, const Type1Result& res);
void write_power_summary_csv(std::ostream& os, const PowerResult& res);

// Runs cfg and writes <out_prefix>.records.csv and <out_prefix>.summary.csv.
// Returns a short human-readable summary for stdout.
std::string run_experiment_to_files(const ExperimentConfig& cfg);

// Deterministic number formatting shared by the CSV writers and the CLI.
std::string fmt_double(double v);                    // %.12g
std::string fmt_pvalue_from_log2(double log2_value); // decimal even below 2^-1074

}  // namespace entropytest
