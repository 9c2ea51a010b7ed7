#pragma once

// Learning rules over bitlang programs: exact minimum-description-length search,
// a structural-risk-minimisation search, population losses, and the pigeonhole
// construction showing that some two-point samples need long interpolators.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <utility>

#include "mdl/bitlang.hpp"
#include "mdl/sources.hpp"

namespace mdl {

enum class LossMode { kExact, kMonteCarlo };
const char* to_string(LossMode mode);

struct LossEstimate {
  double value = 0.0;
  LossMode mode = LossMode::kExact;
  std::size_t n_eval = 0;  ///< 0 for exact
  double std_err = 0.0;    ///< 0 for exact
};

struct LearnerResult {
  std::optional<Expr> program;  ///< absent when the search budget was exhausted
  std::size_t code_len = 0;
  double train_error = 0.0;
  unsigned search_len_budget = 0;
  bool exhausted = false;
  std::uint64_t programs_scanned = 0;
};

/// Dependency sets up to this size give exact population losses.
inline constexpr std::size_t kExactLossMaxBits = 24;
inline constexpr std::size_t kDefaultTestSize = 100000;

/// Fraction of training pairs h mislabels.
double train_error(const Expr& h, const Sample& s);

/// Length-lexicographically first program that interpolates S among the programs
/// of length <= max_len reading only observable bits. Exhausted when none exists.
LearnerResult mdl_search(const Sample& s, unsigned max_len);

/// err + lambda (|h|/m + sqrt(err |h|/m)) with err = errors / m.
double srm_objective(std::size_t errors, std::size_t m, std::size_t len, double lambda);

/// Length-lexicographically first minimiser of srm_objective over programs of
/// length <= max_len.
LearnerResult srm_search(const Sample& s, unsigned max_len, double lambda = 1.0);

/// E_X f(X) under the product instance distribution of `spec`. Exact when
/// |deps| <= kExactLossMaxBits (f may read only bits in deps), else Monte Carlo
/// over n_test fresh test instances.
LossEstimate expected_over_instances(const SourceSpec& spec, const std::set<std::uint64_t>& deps,
                                     const std::function<double(const Instance&)>& f,
                                     std::size_t n_test);

/// Population error P(h(X) != Y).
LossEstimate population_loss(const Expr& h, const SourceSpec& spec,
                             std::size_t n_test = kDefaultTestSize);

/// P(h(X) != ref(X)) under the instance distribution of `spec`.
LossEstimate disagreement(const Expr& h, const Expr& ref, const SourceSpec& spec,
                          std::size_t n_test = kDefaultTestSize);

/// All programs of length < len_budget that read only observable bits, in
/// length-lexicographic order.
std::vector<Expr> programs_shorter_than(unsigned len_budget);

/// First pair x1 < x2 of b-bit instances (zero padded) on which every program
/// shorter than len_budget agrees; nullopt when the fingerprints are all distinct.
std::optional<std::pair<Instance, Instance>> lower_bound_pair(unsigned b, unsigned len_budget);

}  // namespace mdl
