#pragma once

// Closed-form quantities for interpolating MDL: entropies, KL divergences, the
// agnostic and sampling error curves, finite-sample bound right-hand sides,
// and the auxiliary inequalities they rest on. All logarithms are base 2.

#include <cstdint>
#include <limits>
#include <optional>

namespace mdl {

/// A probability in [0, 1]. Construction outside the interval throws DomainError.
class Prob {
 public:
  constexpr Prob() = default;
  explicit Prob(double value);

  constexpr double value() const noexcept { return value_; }
  friend constexpr auto operator<=>(Prob, Prob) = default;

 private:
  double value_ = 0.0;
};

/// Information in bits: a nonnegative real or +infinity.
class Bits {
 public:
  constexpr Bits() = default;
  explicit Bits(double value);
  static constexpr Bits infinite() noexcept {
    Bits b;
    b.value_ = std::numeric_limits<double>::infinity();
    return b;
  }

  constexpr double value() const noexcept { return value_; }
  constexpr bool is_infinite() const noexcept {
    return value_ == std::numeric_limits<double>::infinity();
  }
  friend constexpr auto operator<=>(Bits, Bits) = default;

 private:
  double value_ = 0.0;
};

/// Default stand-in for the unstated constants hidden in the O(.) terms.
inline constexpr double kDefaultBigC = 4.0;

enum class BoundKind { kAgnostic, kRandomLabelNoise, kInterpolatorLength, kKlBudget };

const char* to_string(BoundKind kind);

struct BoundInputs {
  std::uint64_t m = 0;
  double program_len = 0.0;  ///< |h| or |h*| in bits
  double loss = 0.0;         ///< L(h) or L*
  double log_m_bbar = 0.0;   ///< log2(m * quenched prefix length)
  double c_big = kDefaultBigC;
};

/// Evaluated bound right-hand side with its inputs echoed.
struct BoundReport {
  BoundKind kind = BoundKind::kAgnostic;
  BoundInputs inputs;
  double value = 0.0;
  std::optional<double> band_low;   ///< random-label-noise kind only
  std::optional<double> band_high;  ///< random-label-noise kind only
  std::optional<double> half_width; ///< unclamped; random-label-noise kind only
};

/// H(a) = -a log a - (1-a) log(1-a), with 0 log 0 = 0.
Bits binary_entropy(Prob a);
/// KL(a || b) between Bernoulli distributions; infinite when b is 0 or 1 and a != b.
Bits kl_bernoulli(Prob a, Prob b);

/// Agnostic envelope 1 - 2^{-H(a)}.
Prob l_ag(Prob a);
/// The same curve through its product form 1 - a^a (1-a)^(1-a).
double l_ag_product_form(Prob a);
/// Sampling curve 2 L (1 - L).
Prob l_samp(Prob l_star);

/// l_ag(L(h)) + C (|h| + log(m b)) / m, clamped to at most 1.
BoundReport agnostic_rhs(std::uint64_t m, Bits h_len, Prob loss, Bits log_m_bbar,
                         double c_big = kDefaultBigC);

/// Band l_samp(L*) +/- C (R + sqrt(L* R)), R = (|h*| + log(m b)) / m, clamped to [0, 1].
/// `value` carries the band center.
BoundReport rln_band(std::uint64_t m, Bits h_star_len, Prob l_star, Bits log_m_bbar,
                     double c_big = kDefaultBigC);

/// Population-error bound 1 - 2^{-E|A(S)|/m} for an interpolating rule.
Prob gen_bound_from_length(Bits mean_len, std::uint64_t m);

/// KL budget max(0, (E|A(S)| - m H(L*)) / m) for disagreement with h* under label noise.
Bits rln_kl_budget(Bits mean_len, std::uint64_t m, Prob l_star);

/// sqrt(2 a KL) + 2 KL - |b - a|. Requires finite KL(a || b), else DomainError.
double strong_pinsker_gap(Prob a, Prob b);

/// l_ag(a) + c - (1 - 2^{-H(a) - c}); c >= 0.
double lemma_a4_gap(Prob a, double c);

/// m H(k/m) - (m - kp - km) H((k - kp) / (m - kp - km)): the entropy cost lost by
/// removing kp repeated ones and km repeated zeros. Out-of-range arguments throw DomainError.
double lemma_a6_gap(std::uint64_t m, std::uint64_t k_plus, std::uint64_t k_minus,
                    std::uint64_t k);

/// Seed length ceil(m H(k/m) + log m + log b + 1) sufficient for a hash family
/// to realise every labeling with k ones of m distinct b-bit instances.
std::uint64_t seed_length_r(std::uint64_t m, std::uint64_t k, std::uint64_t b);

/// log2 of the union bound on the probability that a random Ber(k/m) function
/// family with 2^r seeds fails to realise some labeling:
///   log2[C(m,k) C(2^b, m)] + 2^r log2(1 - 2^{-m H(k/m)}).
/// Negative values certify failure probability below one. Requires 2^b >= m.
double union_bound_log_fail(std::uint64_t m, std::uint64_t k, std::uint64_t b, std::uint64_t r);

/// log2 C(n, k) for n given as 2^log2n (exact for large n through log1p).
double log2_binomial_pow2(unsigned log2n, std::uint64_t k);
/// log2 C(n, k).
double log2_binomial(std::uint64_t n, std::uint64_t k);

}  // namespace mdl
