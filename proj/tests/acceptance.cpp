// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "mdl/bitlang.hpp"
#include "mdl/core_math.hpp"
#include "mdl/experiments.hpp"
#include "mdl/hash_family.hpp"

using namespace mdl;

namespace {

// Tolerances and limits.
constexpr double kCurveTol = 1e-12;
constexpr double kLemmaTol = 1e-9;
constexpr double kSpotValue = -65.4;
constexpr double kSpotTol = 0.5;
constexpr unsigned kCodecMaxLen = 14;
constexpr double kSeedSuccess = 0.95;
constexpr double kBandMargin = 0.02;
constexpr double kSrmMargin = 0.03;
constexpr double kSigmas = 3.0;
constexpr double kQuenchRate = 0.99;
constexpr std::uint64_t kMasterSeed = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string fmt(const char* pattern, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

int failures = 0;

void report(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const Timer t;
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = t.seconds();
  const bool in_time = limit_s <= 0.0 || s < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %2d %-28s %s (%.2fs%s)\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s,
              in_time ? "" : ", over time limit");
  std::fflush(stdout);
}

SourceSpec label_noise(std::uint64_t num, std::uint64_t den) {
  SourceSpec s;
  RandomLabelNoise r;
  r.h_star = Expr::bit(1);
  r.lstar_num = num;
  r.lstar_den = den;
  s.variant = r;
  s.master_seed = kMasterSeed;
  return s;
}

SourceSpec uniform(std::uint64_t seed) {
  SourceSpec s;
  s.variant = AllZerosY{};
  s.master_seed = seed;
  return s;
}

Outcome curves() {
  double worst_end = 0.0;
  for (double a : {0.0, 0.5}) {
    worst_end = std::max(worst_end, std::abs(l_ag(Prob(a)).value() - a));
    worst_end = std::max(worst_end, std::abs(l_samp(Prob(a)).value() - a));
  }
  bool ordered = true;
  for (int i = 1; i <= 49; ++i) {
    const double a = i / 100.0;
    const double s = l_samp(Prob(a)).value();
    const double g = l_ag(Prob(a)).value();
    ordered = ordered && a < s && s < g && g < 0.5;
  }
  double worst_forms = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const Prob a(i / 1000.0);
    worst_forms = std::max(worst_forms, std::abs(l_ag(a).value() - l_ag_product_form(a)));
  }
  return {worst_end <= kCurveTol && ordered && worst_forms <= kCurveTol,
          fmt("endpoint err %.1e, ordering %s, closed forms agree to %.1e", worst_end,
              ordered ? "holds" : "violated", worst_forms)};
}

Outcome appendix(const LemmaReport& rep) {
  bool ok = true;
  std::string detail;
  for (const auto& c : rep.checks) {
    if (c.name != "lemma_a4" && c.name != "lemma_a5" && c.name != "lemma_a6") continue;
    ok = ok && c.worst >= -kLemmaTol;
    detail += fmt("%s min %.2e; ", c.name.c_str(), c.worst);
  }
  return {ok, detail};
}

Outcome union_bound() {
  double worst = -INFINITY;
  std::size_t n = 0;
  for (std::uint64_t m = 1; m <= 64; ++m) {
    for (std::uint64_t k = 0; k <= m; ++k) {
      for (std::uint64_t b = 1; b <= 64; ++b) {
        if (b < 63 && (std::uint64_t{1} << b) < m) continue;
        worst = std::max(worst, union_bound_log_fail(m, k, b, seed_length_r(m, k, b)));
        ++n;
      }
    }
  }
  const double spot = union_bound_log_fail(4, 2, 8, 10);
  return {worst < 0.0 && std::abs(spot - kSpotValue) <= kSpotTol,
          fmt("%zu triples, max %.3f; spot (4,2,8,10) = %.3f", n, worst, spot)};
}

Outcome codec() {
  std::set<BitString> valid;
  std::size_t total = 0;
  bool ok = true;
  for (unsigned len = 0; len <= kCodecMaxLen; ++len) {
    std::vector<Expr> decoded;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
      const BitString s = BitString::from_uint(v, len);
      const DecodeResult r = try_decode(s);
      if (r.status != DecodeStatus::kOk) continue;
      ok = ok && encode(*r.expr).bits == s;
      for (std::size_t p = 0; p < len; ++p) ok = ok && !valid.contains(s.prefix(p));
      valid.insert(s);
      decoded.push_back(*r.expr);
    }
    ok = ok && enumerate(len) == decoded;
    total += decoded.size();
  }
  return {ok, fmt("%zu codes of length <= %u: prefix free, round trip, enumeration match", total,
                  kCodecMaxLen)};
}

Outcome hash_construction(std::string& csv, unsigned workers) {
  const HashDemoReport r = hash_demo(8, 4, 12, 200, kMasterSeed, workers);
  std::ostringstream out;
  write_hash_demo_csv(out, r);
  csv = out.str();
  std::size_t found = 0;
  for (const auto& t : r.trials) found += t.found ? 1 : 0;
  return {r.budget == 16 && r.success_rate >= kSeedSuccess && r.assembly_ok,
          fmt("r=%llu, found %zu/200 (%.3f), mean |seed| %.2f, assembly %s",
              static_cast<unsigned long long>(r.budget), found, r.success_rate, r.mean_seed_len,
              r.assembly_ok ? "interpolates and matches formula" : "FAILED")};
}

ExperimentConfig tempered_config(unsigned workers) {
  ExperimentConfig c;
  c.source = label_noise(1, 4);
  c.m = 12;
  c.trials = 50;
  c.max_len = 34;
  c.lambda = 1.0;
  c.c_big = kDefaultBigC;
  c.workers = workers;
  return c;
}

Outcome tempered(const ExperimentReport& r) {
  const double l_star = 0.25;
  const double mean = r.mdl_test_error.mean;
  const double se = r.mdl_test_error.std_err;
  const bool a = r.all_interpolate && r.failed == 0 && r.mdl_len.n > 0;
  const bool b = r.in_band.value_or(false) && mean >= l_star + kBandMargin &&
                 mean <= 0.5 - kBandMargin;
  const double margin = mean - r.srm_test_error.mean;
  const bool c = margin >= kSrmMargin;
  const bool d = mean <= r.lemma41_bound + kSigmas * se;
  const bool e = r.lemma42_ok.value_or(false);
  return {a && b && c && d && e,
          fmt("(a)%s (b)%s mdl %.4f+-%.4f band [%.3f,%.3f] (c)%s srm %.4f margin %.4f "
              "(d)%s bound %.4f (e)%s kl %.4f budget %.4f sigma %.4f; exhausted %zu, mean len %.2f",
              a ? "ok" : "NO", b ? "ok" : "NO", mean, se, *r.band->band_low, *r.band->band_high,
              c ? "ok" : "NO", r.srm_test_error.mean, margin, d ? "ok" : "NO", r.lemma41_bound,
              e ? "ok" : "NO", r.lemma42_kl.value_or(NAN), r.lemma42_budget.value_or(NAN),
              r.lemma42_sigma.value_or(NAN), r.exhausted, r.mdl_len.mean)};
}

Outcome realizable(std::string& csv, unsigned workers) {
  ExperimentConfig c;
  c.source = label_noise(0, 1);
  c.m = 8;
  c.trials = 20;
  c.max_len = 34;
  c.workers = workers;
  const ExperimentReport r = run_experiment(c);
  std::ostringstream out;
  write_trials_csv(out, r);
  csv = out.str();
  bool ok = r.failed == 0 && r.exhausted == 0;
  std::size_t max_len = 0;
  for (const auto& t : r.records) {
    ok = ok && t.mdl_test_error && t.mdl_test_error->mode == LossMode::kExact &&
         t.mdl_test_error->value == 0.0 && *t.mdl_len <= 4;
    if (t.mdl_len) max_len = std::max(max_len, *t.mdl_len);
  }
  return {ok, fmt("20 trials, exact test error %.6f, max MDL length %zu", r.mdl_test_error.mean, max_len)};
}

Outcome lower_bound(std::string& text) {
  const LowerBoundReport r = lower_bound_demo(8, 3);
  std::ostringstream out;
  write_lower_bound_report(out, r);
  text = out.str();
  return {r.verified(),
          fmt("pair %s/%s, %zu programs checked, MDL length %zu", r.x1.prefix(8).to_string().c_str(),
              r.x2.prefix(8).to_string().c_str(), r.programs_checked, r.mdl_len.value_or(0))};
}

Outcome quenched(std::string& csv) {
  constexpr std::size_t kRuns = 100;
  constexpr std::size_t kSamplesPerRun = 16;
  std::vector<QuenchRow> rows;
  std::size_t within = 0;
  for (std::size_t m = 8; m <= 256; m *= 2) {
    for (std::uint64_t seed = 0; seed < kRuns; ++seed) {
      const QuenchRow row = quench(uniform(kMasterSeed + seed), m, kSamplesPerRun);
      within += row.estimate <= row.reference ? 1 : 0;
      rows.push_back(row);
    }
  }
  std::ostringstream out;
  write_quench_csv(out, rows);
  csv = out.str();
  bool entropy = true;
  for (unsigned b = 0; b <= kMaxPrefix; ++b) {
    entropy = entropy && min_entropy_prefix(uniform(0), b).value() == static_cast<double>(b);
  }
  const double rate = static_cast<double>(within) / static_cast<double>(rows.size());
  return {rate >= kQuenchRate && entropy,
          fmt("%zu/%zu runs within log2(4 log2 m) (%.3f); min-entropy exact: %s", within,
              rows.size(), rate, entropy ? "yes" : "no")};
}

}  // namespace

int main() {
  report(1, "curve identities", 1.0, curves);
  {
    LemmaReport lemmas;
    report(2, "appendix lemmas", 30.0, [&] {
      lemmas = verify_lemmas();
      return appendix(lemmas);
    });
  }
  report(3, "union-bound certificate", 10.0, union_bound);
  report(4, "codec and enumeration", 60.0, codec);

  std::string hash_a, real_a, lb_a, quench_a, trials_a;
  report(5, "hash construction", 60.0, [&] { return hash_construction(hash_a, 1); });

  ExperimentReport temp;
  report(6, "tempered overfitting", 900.0, [&] {
    temp = run_experiment(tempered_config(1));
    std::ostringstream out;
    write_trials_csv(out, temp);
    trials_a = out.str();
    return tempered(temp);
  });
  report(7, "noiseless realizable", 60.0, [&] { return realizable(real_a, 1); });
  report(8, "lower-bound pair", 10.0, [&] { return lower_bound(lb_a); });
  report(9, "quenched prefix", 30.0, [&] { return quenched(quench_a); });

  report(10, "reproducibility", 0.0, [&] {
    std::string hash_b, real_b, lb_b, quench_b;
    hash_construction(hash_b, 4);
    std::ostringstream out;
    write_trials_csv(out, run_experiment(tempered_config(4)));
    realizable(real_b, 4);
    lower_bound(lb_b);
    quenched(quench_b);
    const bool same[] = {hash_a == hash_b, trials_a == out.str(), real_a == real_b, lb_a == lb_b,
                         quench_a == quench_b};
    bool all = true;
    for (bool s : same) all = all && s;
    return Outcome{all, fmt("1 vs 4 workers: hash %s, tempered %s, realizable %s, lower-bound %s, "
                            "quench %s",
                            same[0] ? "same" : "DIFF", same[1] ? "same" : "DIFF",
                            same[2] ? "same" : "DIFF", same[3] ? "same" : "DIFF",
                            same[4] ? "same" : "DIFF")};
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
