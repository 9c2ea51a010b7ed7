#pragma once

// Seeded Monte Carlo harness: learning-curve trials for MDL and SRM, bound
// audits, hash-construction statistics, the lower-bound pair, quenched prefix
// estimates and the closed-form curves. Everything writes plain CSV.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdl/core_math.hpp"
#include "mdl/learners.hpp"
#include "mdl/sources.hpp"

namespace mdl {

using Settings = std::map<std::string, std::string>;

/// Parses `key=value` lines; `#` starts a comment, blank lines are ignored.
Settings parse_settings(std::istream& in);
Settings load_settings(const std::string& path);

struct ExperimentConfig {
  SourceSpec source;
  std::size_t m = 12;
  std::size_t trials = 50;
  unsigned max_len = 34;
  double lambda = 1.0;
  double c_big = kDefaultBigC;
  std::size_t n_test = kDefaultTestSize;
  unsigned workers = 0;  ///< 0 selects the hardware concurrency
};

/// Builds a config from settings (source keys plus m, trials, max_len, lambda,
/// c_big, n_test, workers, seed). Unknown keys throw PreconditionError.
ExperimentConfig experiment_config(const Settings& settings);

struct TrialRecord {
  std::size_t trial = 0;
  std::size_t m = 0;
  unsigned b_s = 0;
  bool exhausted = false;
  std::optional<Expr> mdl_program;
  std::optional<std::size_t> mdl_len;
  std::optional<LossEstimate> mdl_test_error;
  std::optional<double> mdl_train_error;
  std::optional<double> mdl_disagreement;  ///< with h* under label noise
  std::optional<Expr> srm_program;
  std::optional<std::size_t> srm_len;
  std::optional<LossEstimate> srm_test_error;
  std::optional<std::size_t> construct_len;  ///< absent when the construction failed
  std::optional<bool> construct_interpolates;
  std::string error;
};

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double std_err = 0.0;
};

/// Mean and standard error of the values, accumulated in order.
Summary summarize(const std::vector<double>& values);

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRecord> records;
  Summary mdl_len;
  Summary mdl_test_error;
  Summary srm_test_error;
  Summary b_s;
  Summary construct_len;
  Summary mdl_disagreement;
  std::size_t exhausted = 0;
  std::size_t failed = 0;  ///< trials that raised an error
  bool all_interpolate = true;
  double log_m_bbar = 0.0;

  std::optional<BoundReport> band;  ///< label noise only
  std::optional<bool> in_band;

  double lemma41_bound = 0.0;
  double lemma41_slack = 0.0;
  bool lemma41_ok = false;

  std::optional<double> lemma42_kl;
  std::optional<double> lemma42_budget;
  std::optional<double> lemma42_sigma;
  std::optional<bool> lemma42_ok;

  /// True when every audit that applies holds.
  bool audits_ok() const;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

/// One row per trial; reals with 6 decimals, programs as "len:hex".
void write_trials_csv(std::ostream& out, const ExperimentReport& report);
/// Human-readable key=value summary.
void write_summary(std::ostream& out, const ExperimentReport& report);

struct CurveRow {
  double alpha = 0.0;
  double l_ag = 0.0;
  double l_samp = 0.0;
};

/// Rows for alpha = 0, step, ..., 0.5 (0.5 always included). Requires 0 < step <= 0.1.
std::vector<CurveRow> figure1_curves(double step);
void write_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows);

struct LemmaCheck {
  std::string name;
  std::uint64_t evaluated = 0;
  double worst = 0.0;  ///< min gap, or max value for the union bound
  std::string where;
  bool passed = false;
};

struct LemmaReport {
  std::vector<LemmaCheck> checks;
  double union_spot = 0.0;  ///< union_bound_log_fail(4, 2, 8, 10)
  bool all_passed() const;
};

LemmaReport verify_lemmas();
void write_lemma_report(std::ostream& out, const LemmaReport& report);

struct HashDemoTrial {
  std::size_t trial = 0;
  bool found = false;
  std::optional<BitString> seed;
  bool assembled = false;
  bool interpolates = false;
  std::size_t code_len = 0;
  std::size_t accounted_len = 0;
};

struct HashDemoReport {
  std::uint64_t m = 0;
  std::uint64_t k = 0;
  std::uint64_t b = 0;
  std::uint64_t budget = 0;  ///< seed_length_r(m, k, b)
  std::vector<HashDemoTrial> trials;
  double success_rate = 0.0;
  double mean_seed_len = 0.0;  ///< over successful trials
  double certificate = 0.0;    ///< union_bound_log_fail(m, k, b, budget)
  bool assembly_ok = true;     ///< every assembled interpolator fits and is accounted exactly
};

/// Random distinct b-bit targets with k ones per trial, searched with the seed
/// budget seed_length_r(m, k, b). Requires 1 <= m, k <= m, 1 <= b <= 64, 2^b >= m.
HashDemoReport hash_demo(std::uint64_t m, std::uint64_t k, std::uint64_t b, std::size_t trials,
                         std::uint64_t master_seed = 0, unsigned workers = 0);
void write_hash_demo_csv(std::ostream& out, const HashDemoReport& report);

struct LowerBoundReport {
  unsigned b = 0;
  unsigned budget = 0;
  bool found = false;
  Instance x1;
  Instance x2;
  std::size_t programs_checked = 0;
  bool none_interpolate = false;
  std::optional<std::size_t> mdl_len;
  std::optional<Expr> mdl_program;
  bool verified() const;
};

/// Pair from lower_bound_pair and the checks on it; found is false when the
/// fingerprints are all distinct.
LowerBoundReport lower_bound_demo(unsigned b, unsigned budget);
void write_lower_bound_report(std::ostream& out, const LowerBoundReport& report);

struct QuenchRow {
  std::size_t m = 0;
  std::size_t trials = 0;
  double estimate = 0.0;
  double reference = 0.0;  ///< log2(4 log2 m)
};

QuenchRow quench(const SourceSpec& spec, std::size_t m, std::size_t trials);
void write_quench_csv(std::ostream& out, const std::vector<QuenchRow>& rows);

/// Fixed-point formatting with 6 decimals.
std::string format_real(double v);

}  // namespace mdl
