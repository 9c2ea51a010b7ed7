#pragma once

// Generative sources over (instance, label) pairs, the disambiguation prefix
// length of a sample, its quenched average, prefix min-entropy and Bayes
// quantities.
//
// Randomness is a pure function of (master_seed, stream, trial, i, j):
//   word = prf64(seed = master_seed as 64 bits MSB-first,
//                x    = stream (8 bits) || trial (64) || i (64) || j (8)).
// Instance bit j (1-based) of example i in trial t is Ber(p_j) through
// word(instance stream, t, i, j) < floor(p_j 2^64); label randomness uses
// word(label stream, t, i, 0) the same way.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mdl/bitlang.hpp"
#include "mdl/core_math.hpp"

namespace mdl {

/// Y = h*(X) XOR Ber(L*), uniform instance bits; L* = num / den < 1/2.
struct RandomLabelNoise {
  Expr h_star = Expr::bit(1);
  std::uint64_t lstar_num = 0;
  std::uint64_t lstar_den = 1;
};

/// X[1] ~ Ber(alpha), other bits uniform; Y = X[2] if X[1] == 0 else Ber(beta).
struct AgnosticMixture {
  double alpha = 0.5;
  double beta = 0.5;
};

/// Uniform instance bits, Y = 0.
struct AllZerosY {};

/// Bit i ~ Ber(min(1/2, c / i)) independently; Y = X[1].
struct SparseDiff {
  double c = 1.0;
};

using SourceVariant = std::variant<RandomLabelNoise, AgnosticMixture, AllZerosY, SparseDiff>;

struct SourceSpec {
  SourceVariant variant = AllZerosY{};
  std::uint64_t master_seed = 0;

  /// Throws PreconditionError when parameters violate the source invariants.
  void validate() const;
  /// One-line key=value description, e.g. "source=rln lstar=1/4 hstar=4:9 master_seed=7".
  std::string describe() const;
};

enum class Stream : std::uint8_t {
  kTrainInstance = 0,
  kTrainLabel = 1,
  kTestInstance = 2,
  kTestLabel = 3,
  kHashDemo = 4,
};

std::uint64_t stream_word(std::uint64_t master_seed, Stream stream, std::uint64_t trial,
                          std::uint64_t i, std::uint64_t j);

/// floor(p 2^64), saturating; a uniform word below it is a Ber(p) success.
std::uint64_t bernoulli_threshold(double p);
bool bernoulli_draw(std::uint64_t word, double p);

struct Example {
  Instance x;
  bool y = false;

  friend bool operator==(const Example&, const Example&) = default;
};

struct Sample {
  std::vector<Example> examples;
  std::size_t m() const noexcept { return examples.size(); }
};

/// Throws InconsistencyError if some instance appears with both labels.
void check_interpolable(const Sample& s);

/// Ber parameter of instance bit i (1-based) under the source.
double bit_probability(const SourceSpec& spec, unsigned i);
Instance draw_instance(const SourceSpec& spec, Stream stream, std::uint64_t trial,
                       std::uint64_t index);
/// Label for x drawn with the label randomness of (stream, trial, index).
bool draw_label(const SourceSpec& spec, const Instance& x, Stream stream, std::uint64_t trial,
                std::uint64_t index);

/// m i.i.d. training pairs for `trial`; deterministic in (master_seed, trial).
Sample sample(const SourceSpec& spec, std::size_t m, std::uint64_t trial);

/// Minimal b such that equal b-prefixes imply equal pairs; 0 when all pairs are equal.
/// Distinct labels on instances that agree on all kMaxPrefix bits throw CapacityError.
unsigned disambiguation_prefix(const Sample& s);

/// (1/trials) sum_t log2 b(S_t), with log2 0 taken as 0.
Bits quenched_estimate(const SourceSpec& spec, std::size_t m, std::size_t trials);

/// sum_{i<=b} -log2 max(p_i, 1 - p_i) for the product instance distribution.
Bits min_entropy_prefix(const SourceSpec& spec, unsigned b);

Prob bayes_error(const SourceSpec& spec);
/// Limiting MDL error when known in closed form (label noise, agnostic mixture).
std::optional<Prob> asymptotic_mdl_error(const SourceSpec& spec);
/// L* as a probability for the label-noise source, nullopt otherwise.
std::optional<Prob> label_noise(const SourceSpec& spec);

/// Builds a SourceSpec from key=value settings:
///   source=rln|mixture|zeros|sparse, lstar_num, lstar_den, alpha, beta, c,
///   hstar=<serialized program>, master_seed. Unknown keys are ignored.
SourceSpec parse_source(const std::map<std::string, std::string>& settings);

}  // namespace mdl
