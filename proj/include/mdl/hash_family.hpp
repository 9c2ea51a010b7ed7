#pragma once

// Seeded hash family standing in for the existence-proof family behind the
// short interpolating program, plus seed search and the composite
// "reference XOR hash" interpolator.
//
// The PRF is normative and bit-exact:
//   message = gamma(|seed|+1) || seed || gamma(|x|+1) || x, packed MSB-first into
//   64-bit words w_0, w_1, ... with the last word zero-padded;
//   state = 0x9E3779B97F4A7C15;
//   state = mix64(state ^ w_i ^ (i+1) * 0x9E3779B97F4A7C15)   for each word;
//   prf64 = mix64(state)
// with mix64 the splitmix64 finalizer.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mdl/bitlang.hpp"
#include "mdl/bitstring.hpp"

namespace mdl {

struct Sample;

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// Incremental form of the PRF: append the message fields, then finish().
class PrfBuilder {
 public:
  /// Appends the low n bits of value (n <= 64), most significant first.
  void append(std::uint64_t value, unsigned n) noexcept;
  void append_gamma(std::uint64_t n) noexcept;
  void append_bits(const BitString& bits) noexcept;
  std::uint64_t finish() noexcept;

 private:
  void flush() noexcept;

  std::uint64_t state_ = kGoldenGamma;
  std::uint64_t current_ = 0;
  std::uint64_t words_ = 0;
  unsigned fill_ = 0;
};

std::uint64_t prf64(const BitString& seed, const BitString& x_prefix);
/// prf64 for a seed and prefix of at most 64 bits each, given right-aligned in words.
std::uint64_t prf64_packed(std::uint64_t seed, unsigned seed_len, std::uint64_t x_prefix,
                           unsigned prefix_len) noexcept;

/// floor(k 2^64 / m); the k == m case is handled by the predictor, not here.
std::uint64_t hash_threshold(std::uint64_t k, std::uint64_t m);

/// 1 iff prf64(seed, x) < floor(k 2^64 / m); always 1 when k == m.
bool hash_predict(const BitString& seed, std::uint64_t k, std::uint64_t m,
                  const BitString& x_prefix);
bool hash_predict_packed(std::uint64_t seed, unsigned seed_len, std::uint64_t k, std::uint64_t m,
                         std::uint64_t x_prefix, unsigned prefix_len);

struct HashParams {
  std::uint64_t m = 1;
  std::uint64_t k = 0;
  std::uint64_t b = 1;
};

struct HashTarget {
  BitString x_prefix;
  bool y = false;
};

/// First seed in length-lexicographic order (length 0, 1, ..., max_len) whose hash
/// reproduces every target with k = sum of labels and m = number of targets.
/// Duplicate prefixes throw PreconditionError; max_len must be <= 63.
std::optional<BitString> find_seed(std::span<const HashTarget> targets, unsigned max_len);

/// Removes repeated (x, y) pairs, keeping first occurrences in order.
/// The same prefix with both labels throws InconsistencyError.
std::vector<HashTarget> dedupe(std::span<const HashTarget> targets);

/// Extra seed bits allowed over seed_length_r when assembling an interpolator.
inline constexpr unsigned kSeedSlack = 8;

struct Interpolator {
  Expr program;        ///< Xor(h_ref, Hash(m', k', b, seed))
  HashParams params;   ///< after duplicate removal
  BitString seed;
  std::uint64_t seed_budget = 0;  ///< seed_length_r(m', k', b)
  std::size_t code_len = 0;
};

/// Exact code length of Xor(h_ref, Hash(m, k, b, seed)):
/// 3 + |h_ref| + 4 + g(m) + g(k+1) + g(b) + g(|seed|+1) + |seed|, g = gamma length.
std::size_t interpolator_code_length(std::size_t ref_len, const HashParams& params,
                                     std::size_t seed_len);

/// Builds h_ref XOR Hash interpolating S on the residuals y XOR h_ref(x), hashing
/// the first max(1, b(S)) bits. Throws ConstructionError when no seed of length
/// <= seed_length_r + kSeedSlack exists.
Interpolator assemble_interpolator(const Expr& h_ref, const Sample& sample);

}  // namespace mdl
