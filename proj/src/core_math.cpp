#include "mdl/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mdl/errors.hpp"

namespace mdl {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// -p log2 p with the 0 log 0 = 0 convention.
double neg_plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

// p log2(p / q), with 0 log(0/q) = 0 and +inf when q == 0 < p.
double plog_ratio(double p, double q) {
  if (p == 0.0) return 0.0;
  if (q == 0.0) return std::numeric_limits<double>::infinity();
  return p * std::log2(p / q);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// 2^r * log2(1 - x) for x in [0, 1]; the series branch keeps tiny x from
// rounding 1 - x to 1 before the huge multiplier is applied.
double scaled_log2_one_minus(double x, std::uint64_t r) {
  const double scale = std::ldexp(1.0, static_cast<int>(r));
  if (x >= 1.0) return -std::numeric_limits<double>::infinity();
  if (x < 1e-8) return -scale * x / kLn2 * (1.0 + x / 2.0 + x * x / 3.0);
  return scale * std::log1p(-x) / kLn2;
}

}  // namespace

Prob::Prob(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) throw DomainError("probability outside [0, 1]");
}

Bits::Bits(double value) : value_(value) {
  if (!(value >= 0.0)) throw DomainError("bit count must be nonnegative");
}

const char* to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::kAgnostic: return "agnostic";
    case BoundKind::kRandomLabelNoise: return "random-label-noise";
    case BoundKind::kInterpolatorLength: return "interpolator-length";
    case BoundKind::kKlBudget: return "kl-budget";
  }
  return "unknown";
}

Bits binary_entropy(Prob a) {
  const double h = neg_plogp(a.value()) + neg_plogp(1.0 - a.value());
  return Bits(std::clamp(h, 0.0, 1.0));
}

Bits kl_bernoulli(Prob a, Prob b) {
  const double p = a.value();
  const double q = b.value();
  if (p == q) return Bits(0.0);
  const double kl = plog_ratio(p, q) + plog_ratio(1.0 - p, 1.0 - q);
  if (std::isinf(kl)) return Bits::infinite();
  return Bits(std::max(kl, 0.0));
}

Prob l_ag(Prob a) { return Prob(clamp01(-std::expm1(-binary_entropy(a).value() * kLn2))); }

double l_ag_product_form(Prob a) {
  const double p = a.value();
  // std::pow(0, 0) == 1, which matches the 0^0 convention.
  return 1.0 - std::pow(p, p) * std::pow(1.0 - p, 1.0 - p);
}

Prob l_samp(Prob l_star) {
  const double p = l_star.value();
  return Prob(clamp01(2.0 * p * (1.0 - p)));
}

BoundReport agnostic_rhs(std::uint64_t m, Bits h_len, Prob loss, Bits log_m_bbar, double c_big) {
  if (m == 0) throw PreconditionError("agnostic_rhs requires m >= 1");
  if (!(c_big > 0.0)) throw PreconditionError("agnostic_rhs requires C > 0");
  BoundReport r;
  r.kind = BoundKind::kAgnostic;
  r.inputs = {m, h_len.value(), loss.value(), log_m_bbar.value(), c_big};
  const double slack = c_big * (h_len.value() + log_m_bbar.value()) / static_cast<double>(m);
  r.value = std::min(1.0, l_ag(loss).value() + slack);
  return r;
}

BoundReport rln_band(std::uint64_t m, Bits h_star_len, Prob l_star, Bits log_m_bbar,
                     double c_big) {
  if (m == 0) throw PreconditionError("rln_band requires m >= 1");
  if (!(c_big > 0.0)) throw PreconditionError("rln_band requires C > 0");
  BoundReport r;
  r.kind = BoundKind::kRandomLabelNoise;
  r.inputs = {m, h_star_len.value(), l_star.value(), log_m_bbar.value(), c_big};
  const double rate = (h_star_len.value() + log_m_bbar.value()) / static_cast<double>(m);
  const double half_width = c_big * (rate + std::sqrt(l_star.value() * rate));
  r.value = l_samp(l_star).value();
  r.half_width = half_width;
  r.band_low = clamp01(r.value - half_width);
  r.band_high = clamp01(r.value + half_width);
  return r;
}

Prob gen_bound_from_length(Bits mean_len, std::uint64_t m) {
  if (m == 0) throw PreconditionError("gen_bound_from_length requires m >= 1");
  return Prob(clamp01(-std::expm1(-mean_len.value() / static_cast<double>(m) * kLn2)));
}

Bits rln_kl_budget(Bits mean_len, std::uint64_t m, Prob l_star) {
  if (m == 0) throw PreconditionError("rln_kl_budget requires m >= 1");
  const double md = static_cast<double>(m);
  const double budget = (mean_len.value() - md * binary_entropy(l_star).value()) / md;
  return Bits(std::max(0.0, budget));
}

double strong_pinsker_gap(Prob a, Prob b) {
  const Bits kl = kl_bernoulli(a, b);
  if (kl.is_infinite()) throw DomainError("strong_pinsker_gap requires finite KL");
  const double d = kl.value();
  return std::sqrt(2.0 * a.value() * d) + 2.0 * d - std::abs(b.value() - a.value());
}

double lemma_a4_gap(Prob a, double c) {
  if (!(c >= 0.0)) throw DomainError("lemma_a4_gap requires C >= 0");
  const double h = binary_entropy(a).value();
  return l_ag(a).value() + c + std::expm1(-(h + c) * kLn2);
}

double lemma_a6_gap(std::uint64_t m, std::uint64_t k_plus, std::uint64_t k_minus,
                    std::uint64_t k) {
  if (k_plus + k_minus >= m) throw DomainError("lemma_a6_gap requires m > k+ + k-");
  if (k > m) throw DomainError("lemma_a6_gap requires k <= m");
  if (k < k_plus) throw DomainError("lemma_a6_gap requires k >= k+");
  if (m - k < k_minus) throw DomainError("lemma_a6_gap requires m - k >= k-");
  const double md = static_cast<double>(m);
  const double reduced = static_cast<double>(m - k_plus - k_minus);
  const double ones = static_cast<double>(k - k_plus);
  return md * binary_entropy(Prob(static_cast<double>(k) / md)).value() -
         reduced * binary_entropy(Prob(ones / reduced)).value();
}

std::uint64_t seed_length_r(std::uint64_t m, std::uint64_t k, std::uint64_t b) {
  if (m == 0 || k > m || b == 0) throw PreconditionError("seed_length_r requires 1<=m, k<=m, b>=1");
  const double md = static_cast<double>(m);
  const double r = md * binary_entropy(Prob(static_cast<double>(k) / md)).value() +
                   std::log2(md) + std::log2(static_cast<double>(b)) + 1.0;
  // Integral values like 10.000000000000002 must not round up.
  return static_cast<std::uint64_t>(std::ceil(r - 1e-9));
}

double log2_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return (std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0)) / kLn2;
}

double log2_binomial_pow2(unsigned log2n, std::uint64_t k) {
  const double n = std::ldexp(1.0, static_cast<int>(log2n));
  if (static_cast<double>(k) > n) return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (std::uint64_t j = 0; j < k; ++j) {
    const double jd = static_cast<double>(j);
    acc += static_cast<double>(log2n) + std::log1p(-jd / n) / kLn2 - std::log2(jd + 1.0);
  }
  return acc;
}

double union_bound_log_fail(std::uint64_t m, std::uint64_t k, std::uint64_t b, std::uint64_t r) {
  if (m == 0 || k > m) throw PreconditionError("union_bound_log_fail requires m >= 1, k <= m");
  if (b == 0 || (b < 64 && (std::uint64_t{1} << b) < m)) {
    throw DomainError("union_bound_log_fail requires 2^b >= m");
  }
  if (r > 1000) throw DomainError("union_bound_log_fail seed length too large");
  const double md = static_cast<double>(m);
  const double h = binary_entropy(Prob(static_cast<double>(k) / md)).value();
  const double log_count = log2_binomial(m, k) + log2_binomial_pow2(static_cast<unsigned>(b), m);
  const double x = std::exp2(-md * h);
  return log_count + scaled_log2_one_minus(x, r);
}

}  // namespace mdl
