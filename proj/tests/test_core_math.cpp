#include <cmath>
#include <limits>

#include "doctest.h"
#include "mdl/core_math.hpp"
#include "mdl/errors.hpp"

using namespace mdl;

namespace {

double h(double a) { return binary_entropy(Prob(a)).value(); }

}  // namespace

TEST_CASE("prob and bits reject out-of-range values") {
  CHECK_THROWS_AS(Prob(-0.01), DomainError);
  CHECK_THROWS_AS(Prob(1.01), DomainError);
  CHECK_THROWS_AS(Prob(std::nan("")), DomainError);
  CHECK_THROWS_AS(Bits(-1.0), DomainError);
  CHECK(Bits::infinite().is_infinite());
  CHECK(Prob(0.0).value() == 0.0);
  CHECK(Prob(1.0).value() == 1.0);
}

TEST_CASE("binary entropy") {
  CHECK(h(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h(0.0) == 0.0);
  CHECK(h(1.0) == 0.0);
  CHECK(h(0.25) == doctest::Approx(0.8112781244591328).epsilon(1e-12));
  for (int i = 0; i <= 100; ++i) {
    const double a = i / 100.0;
    CHECK(h(a) == doctest::Approx(h(1.0 - a)).epsilon(1e-12));
  }
}

TEST_CASE("kl divergence") {
  CHECK(kl_bernoulli(Prob(0.3), Prob(0.3)).value() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(kl_bernoulli(Prob(0.25), Prob(0.5)).value() ==
        doctest::Approx(0.18872187554086717).epsilon(1e-12));
  CHECK(kl_bernoulli(Prob(0.5), Prob(0.0)).is_infinite());
  CHECK(kl_bernoulli(Prob(0.0), Prob(0.0)).value() == 0.0);
  CHECK(kl_bernoulli(Prob(1.0), Prob(1.0)).value() == 0.0);
  CHECK(kl_bernoulli(Prob(0.0), Prob(0.5)).value() == doctest::Approx(1.0));
}

TEST_CASE("kl is nonnegative and zero only on the diagonal") {
  for (int i = 0; i <= 50; ++i) {
    for (int j = 1; j < 50; ++j) {
      const double a = i / 50.0;
      const double b = j / 50.0;
      const double kl = kl_bernoulli(Prob(a), Prob(b)).value();
      CHECK(kl >= 0.0);
      if (i != j) CHECK(kl > 0.0);
      else CHECK(kl == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("agnostic and sampling curves") {
  CHECK(l_ag(Prob(0.0)).value() == 0.0);
  CHECK(l_ag(Prob(0.5)).value() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(l_ag(Prob(0.25)).value() == doctest::Approx(0.4301232357613056).epsilon(1e-12));
  CHECK(l_samp(Prob(0.0)).value() == 0.0);
  CHECK(l_samp(Prob(0.5)).value() == 0.5);
  CHECK(l_samp(Prob(0.25)).value() == 0.375);
  for (int i = 0; i <= 1000; ++i) {
    const double a = i / 1000.0;
    CHECK(std::abs(l_ag(Prob(a)).value() - l_ag_product_form(Prob(a))) <= 1e-12);
  }
  for (int i = 1; i <= 49; ++i) {
    const double a = i / 100.0;
    CHECK(a < l_samp(Prob(a)).value());
    CHECK(l_samp(Prob(a)).value() < l_ag(Prob(a)).value());
    CHECK(l_ag(Prob(a)).value() < 0.5);
  }
}

TEST_CASE("agnostic bound right-hand side") {
  const auto big = agnostic_rhs(1000000000, Bits(4), Prob(0.25), Bits(10), 4);
  CHECK(big.value == doctest::Approx(0.43013).epsilon(1e-4));
  CHECK(big.kind == BoundKind::kAgnostic);
  CHECK(!big.band_low.has_value());

  CHECK(agnostic_rhs(16, Bits(4), Prob(0.0), Bits(8), 4).value == 1.0);

  const auto r = agnostic_rhs(100, Bits(10), Prob(0.1), Bits(10), 1);
  CHECK(std::abs(r.value - (l_ag(Prob(0.1)).value() + 0.2)) <= 1e-9);
  CHECK(r.inputs.m == 100);
  CHECK(r.inputs.c_big == 1.0);
}

TEST_CASE("random label noise band") {
  const auto zero = rln_band(100, Bits(4), Prob(0.0), Bits(8), 4);
  CHECK(zero.value == 0.0);
  CHECK(*zero.band_low == 0.0);

  const auto big = rln_band(1000000000, Bits(4), Prob(0.25), Bits(10), 4);
  CHECK(*big.band_low == doctest::Approx(0.375).epsilon(1e-3));
  CHECK(*big.band_high == doctest::Approx(0.375).epsilon(1e-3));

  const auto small = rln_band(16, Bits(4), Prob(0.25), Bits(8), 4);
  CHECK(std::abs(*small.half_width - 4.0 * (0.75 + std::sqrt(0.1875))) <= 1e-9);
  CHECK(*small.band_low == 0.0);
  CHECK(*small.band_high == 1.0);
  CHECK(small.value == 0.375);
  CHECK(small.kind == BoundKind::kRandomLabelNoise);
}

TEST_CASE("length-based bounds") {
  CHECK(gen_bound_from_length(Bits(0), 10).value() == 0.0);
  CHECK(gen_bound_from_length(Bits(10), 10).value() == doctest::Approx(0.5));
  CHECK(gen_bound_from_length(Bits(8.112781244591328), 10).value() ==
        doctest::Approx(0.43013).epsilon(1e-4));
  for (int len = 0; len < 60; ++len) {
    CHECK(gen_bound_from_length(Bits(len), 12).value() <
          gen_bound_from_length(Bits(len + 1), 12).value());
    CHECK(gen_bound_from_length(Bits(len + 1), 12).value() >
          gen_bound_from_length(Bits(len + 1), 13).value());
  }

  const double noise = h(0.25);
  CHECK(rln_kl_budget(Bits(12 * noise), 12, Prob(0.25)).value() ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rln_kl_budget(Bits(12 * noise + 1.2), 12, Prob(0.25)).value() ==
        doctest::Approx(0.1).epsilon(1e-12));
  CHECK(rln_kl_budget(Bits(0), 5, Prob(0.25)).value() == 0.0);
}

TEST_CASE("strong pinsker gap") {
  CHECK(strong_pinsker_gap(Prob(0.3), Prob(0.3)) == doctest::Approx(0.0).epsilon(1e-15));
  const double kl = 0.18872187554086717;
  CHECK(std::abs(strong_pinsker_gap(Prob(0.25), Prob(0.5)) -
                 (std::sqrt(2 * 0.25 * kl) + 2 * kl - 0.25)) <= 1e-9);
  CHECK_THROWS_AS(strong_pinsker_gap(Prob(0.5), Prob(0.0)), DomainError);
  for (int i = 1; i <= 99; ++i) {
    for (int j = 1; j <= 99; ++j) {
      CHECK(strong_pinsker_gap(Prob(i / 100.0), Prob(j / 100.0)) >= -1e-12);
    }
  }
}

TEST_CASE("lemma a4 gap") {
  for (int i = 0; i <= 100; ++i) {
    CHECK(std::abs(lemma_a4_gap(Prob(i / 100.0), 0.0)) <= 1e-12);
  }
  CHECK(std::abs(lemma_a4_gap(Prob(0.5), 1.0) - 0.75) <= 1e-12);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j <= 160; ++j) worst = std::min(worst, lemma_a4_gap(Prob(i / 200.0), j / 20.0));
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("lemma a6 gap") {
  for (std::uint64_t k = 0; k <= 10; ++k) CHECK(lemma_a6_gap(10, 0, 0, k) == 0.0);
  CHECK(lemma_a6_gap(10, 1, 1, 5) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(lemma_a6_gap(10, 6, 4, 6), DomainError);
  CHECK_THROWS_AS(lemma_a6_gap(10, 3, 0, 2), DomainError);
  CHECK_THROWS_AS(lemma_a6_gap(10, 0, 6, 5), DomainError);
  CHECK_THROWS_AS(lemma_a6_gap(10, 0, 0, 11), DomainError);
  for (std::uint64_t m = 1; m <= 40; ++m) {
    for (std::uint64_t k = 0; k <= m; ++k) {
      for (std::uint64_t kp = 0; kp <= k; ++kp) {
        for (std::uint64_t km = 0; km <= m - k && kp + km < m; ++km) {
          CHECK(lemma_a6_gap(m, kp, km, k) >= -1e-9);
        }
      }
    }
  }
}

TEST_CASE("seed length") {
  CHECK(seed_length_r(8, 4, 12) == 16);
  CHECK(seed_length_r(4, 2, 8) == 10);
  for (std::uint64_t m = 1; m <= 32; ++m) {
    for (std::uint64_t b = 1; b <= 16; ++b) {
      const double expect = std::ceil(std::log2(double(m)) + std::log2(double(b)) + 1.0 - 1e-9);
      CHECK(seed_length_r(m, 0, b) == static_cast<std::uint64_t>(expect));
    }
  }
}

TEST_CASE("union bound certificate") {
  CHECK(union_bound_log_fail(4, 2, 8, 10) == doctest::Approx(-65.37799839855168).epsilon(1e-9));
  CHECK(union_bound_log_fail(4, 2, 8, 0) > 0.0);
  CHECK_THROWS_AS(union_bound_log_fail(5, 2, 2, 10), DomainError);
  for (std::uint64_t m = 1; m <= 64; m += 3) {
    for (std::uint64_t k = 0; k <= m; ++k) {
      for (std::uint64_t b = 1; b <= 64; ++b) {
        if (b < 63 && (std::uint64_t{1} << b) < m) continue;
        CHECK(union_bound_log_fail(m, k, b, seed_length_r(m, k, b)) < 0.0);
      }
    }
  }
}

TEST_CASE("log binomials") {
  CHECK(log2_binomial(4, 2) == doctest::Approx(std::log2(6.0)).epsilon(1e-12));
  CHECK(log2_binomial(10, 0) == doctest::Approx(0.0));
  CHECK(log2_binomial_pow2(8, 4) == doctest::Approx(std::log2(174792640.0)).epsilon(1e-12));
  CHECK(log2_binomial_pow2(8, 4) == doctest::Approx(log2_binomial(256, 4)).epsilon(1e-10));
  CHECK(log2_binomial_pow2(64, 1) == doctest::Approx(64.0).epsilon(1e-12));
}
