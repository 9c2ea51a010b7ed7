#include "mdl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "mdl/errors.hpp"
#include "mdl/hash_family.hpp"

namespace mdl {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size() || text.front() == '-') {
    throw PreconditionError("cannot parse " + key + "=" + text);
  }
  return v;
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size()) {
    throw PreconditionError("cannot parse " + key + "=" + text);
  }
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class T, class F>
std::string opt(const std::optional<T>& v, F&& fmt) {
  return v ? fmt(*v) : std::string{};
}

std::string program_field(const std::optional<Expr>& e) {
  return opt(e, [](const Expr& x) { return encode(x).serialize(); });
}

// Runs body(i) for i in [0, n) on `workers` threads; results must be written by index.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& body) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t t) {
  TrialRecord rec;
  rec.trial = t;
  rec.m = config.m;
  try {
    const SourceSpec& spec = config.source;
    const Sample s = sample(spec, config.m, t);
    rec.b_s = disambiguation_prefix(s);
    const auto* rln = std::get_if<RandomLabelNoise>(&spec.variant);

    const LearnerResult mdl = mdl_search(s, config.max_len);
    rec.exhausted = mdl.exhausted;
    if (mdl.program) {
      rec.mdl_program = *mdl.program;
      rec.mdl_len = mdl.code_len;
      rec.mdl_train_error = mdl.train_error;
      rec.mdl_test_error = population_loss(*mdl.program, spec, config.n_test);
      if (rln) rec.mdl_disagreement = disagreement(*mdl.program, rln->h_star, spec, config.n_test).value;
    }

    const LearnerResult srm = srm_search(s, config.max_len, config.lambda);
    if (srm.program) {
      rec.srm_program = *srm.program;
      rec.srm_len = srm.code_len;
      rec.srm_test_error = population_loss(*srm.program, spec, config.n_test);
    }

    try {
      const Interpolator ip = assemble_interpolator(rln ? rln->h_star : Expr::zero(), s);
      rec.construct_len = ip.code_len;
      rec.construct_interpolates = train_error(ip.program, s) == 0.0;
    } catch (const ConstructionError&) {
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

Settings parse_settings(std::istream& in) {
  Settings out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw PreconditionError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw PreconditionError("line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

Settings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open config file " + path);
  return parse_settings(in);
}

ExperimentConfig experiment_config(const Settings& settings) {
  static const std::set<std::string> source_keys = {"source", "lstar_num", "lstar_den", "alpha",
                                                    "beta",   "c",         "hstar",     "master_seed"};
  Settings source;
  ExperimentConfig config;
  for (const auto& [key, value] : settings) {
    if (source_keys.contains(key)) {
      source[key] = value;
    } else if (key == "seed") {
      source["master_seed"] = value;
    } else if (key == "m") {
      config.m = to_u64(key, value);
    } else if (key == "trials") {
      config.trials = to_u64(key, value);
    } else if (key == "max_len") {
      config.max_len = static_cast<unsigned>(to_u64(key, value));
    } else if (key == "lambda") {
      config.lambda = to_double(key, value);
    } else if (key == "c_big") {
      config.c_big = to_double(key, value);
    } else if (key == "n_test") {
      config.n_test = to_u64(key, value);
    } else if (key == "workers") {
      config.workers = static_cast<unsigned>(to_u64(key, value));
    } else {
      throw PreconditionError("unknown setting '" + key + "'");
    }
  }
  config.source = parse_source(source);
  if (config.m == 0) throw PreconditionError("m must be positive");
  if (config.trials == 0) throw PreconditionError("trials must be positive");
  if (!(config.lambda >= 0.0)) throw PreconditionError("lambda must be nonnegative");
  return config;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (const double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_err = std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
  }
  return s;
}

bool ExperimentReport::audits_ok() const {
  return all_interpolate && failed == 0 && lemma41_ok && lemma42_ok.value_or(true);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.trials == 0) throw PreconditionError("run_experiment requires trials >= 1");
  config.source.validate();
  ExperimentReport rep;
  rep.config = config;
  rep.records.resize(config.trials);
  parallel_for(config.trials, config.workers,
               [&](std::size_t t) { rep.records[t] = run_trial(config, t); });

  std::vector<double> len, test, srm, bs, construct, dis;
  for (const auto& r : rep.records) {
    if (!r.error.empty()) {
      ++rep.failed;
      continue;
    }
    bs.push_back(r.b_s);
    if (r.exhausted) ++rep.exhausted;
    if (r.mdl_len) {
      len.push_back(static_cast<double>(*r.mdl_len));
      test.push_back(r.mdl_test_error->value);
      rep.all_interpolate = rep.all_interpolate && *r.mdl_train_error == 0.0;
    }
    if (r.mdl_disagreement) dis.push_back(*r.mdl_disagreement);
    if (r.srm_test_error) srm.push_back(r.srm_test_error->value);
    if (r.construct_len) construct.push_back(static_cast<double>(*r.construct_len));
  }
  rep.mdl_len = summarize(len);
  rep.mdl_test_error = summarize(test);
  rep.srm_test_error = summarize(srm);
  rep.b_s = summarize(bs);
  rep.construct_len = summarize(construct);
  rep.mdl_disagreement = summarize(dis);

  const double m = static_cast<double>(config.m);
  rep.log_m_bbar = std::log2(m * std::max(1.0, rep.b_s.mean));

  rep.lemma41_bound = gen_bound_from_length(Bits(rep.mdl_len.mean), config.m).value();
  rep.lemma41_slack = rep.lemma41_bound - rep.mdl_test_error.mean;
  rep.lemma41_ok = rep.mdl_len.n > 0 && rep.lemma41_slack >= -3.0 * rep.mdl_test_error.std_err;

  if (const auto* rln = std::get_if<RandomLabelNoise>(&config.source.variant)) {
    const Prob l_star(static_cast<double>(rln->lstar_num) / static_cast<double>(rln->lstar_den));
    rep.band = rln_band(config.m, Bits(static_cast<double>(code_length(rln->h_star))), l_star,
                        Bits(rep.log_m_bbar), config.c_big);
    if (rep.mdl_test_error.n > 0) {
      rep.in_band = *rep.band->band_low <= rep.mdl_test_error.mean &&
                    rep.mdl_test_error.mean <= *rep.band->band_high;
    }
    if (rep.mdl_disagreement.n > 0) {
      const double a = l_star.value();
      const double d = rep.mdl_disagreement.mean;
      rep.lemma42_kl = kl_bernoulli(l_star, Prob(d)).value();
      rep.lemma42_budget = rln_kl_budget(Bits(rep.mdl_len.mean), config.m, l_star).value();
      // First-order propagation of the disagreement and length standard errors.
      const double slope = (d > 0.0 && d < 1.0) ? (d - a) / (d * (1.0 - d) * std::log(2.0)) : 0.0;
      const double sk = slope * rep.mdl_disagreement.std_err;
      const double sb = *rep.lemma42_budget > 0.0 ? rep.mdl_len.std_err / m : 0.0;
      rep.lemma42_sigma = std::sqrt(sk * sk + sb * sb);
      rep.lemma42_ok = *rep.lemma42_kl <= *rep.lemma42_budget + 3.0 * *rep.lemma42_sigma;
    }
  }
  return rep;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_trials_csv(std::ostream& out, const ExperimentReport& report) {
  out << "trial,m,b_s,exhausted,mdl_len,mdl_program,mdl_train_error,mdl_test_error,mdl_loss_mode,"
         "mdl_disagreement,srm_len,srm_program,srm_test_error,construct_len,construct_interpolates,"
         "error\n";
  const auto real = [](double v) { return format_real(v); };
  const auto count = [](std::size_t v) { return std::to_string(v); };
  const auto loss = [](const LossEstimate& l) { return format_real(l.value); };
  for (const auto& r : report.records) {
    out << r.trial << ',' << r.m << ',' << r.b_s << ',' << (r.exhausted ? 1 : 0) << ','
        << opt(r.mdl_len, count) << ',' << program_field(r.mdl_program) << ','
        << opt(r.mdl_train_error, real) << ',' << opt(r.mdl_test_error, loss) << ','
        << opt(r.mdl_test_error, [](const LossEstimate& l) { return std::string(to_string(l.mode)); })
        << ',' << opt(r.mdl_disagreement, real) << ',' << opt(r.srm_len, count) << ','
        << program_field(r.srm_program) << ',' << opt(r.srm_test_error, loss) << ','
        << opt(r.construct_len, count) << ','
        << opt(r.construct_interpolates, [](bool b) { return std::string(b ? "1" : "0"); }) << ','
        << csv_field(r.error) << '\n';
  }
}

void write_summary(std::ostream& out, const ExperimentReport& report) {
  const auto line = [&](const std::string& key, const std::string& value) {
    out << key << '=' << value << '\n';
  };
  const auto summary = [&](const std::string& key, const Summary& s) {
    line(key + "_mean", format_real(s.mean));
    line(key + "_stderr", format_real(s.std_err));
    line(key + "_n", std::to_string(s.n));
  };
  line("source", report.config.source.describe());
  line("m", std::to_string(report.config.m));
  line("trials", std::to_string(report.config.trials));
  line("max_len", std::to_string(report.config.max_len));
  line("lambda", format_real(report.config.lambda));
  line("exhausted", std::to_string(report.exhausted));
  line("failed", std::to_string(report.failed));
  line("all_interpolate", report.all_interpolate ? "1" : "0");
  summary("mdl_len", report.mdl_len);
  summary("mdl_test_error", report.mdl_test_error);
  summary("srm_test_error", report.srm_test_error);
  summary("b_s", report.b_s);
  summary("construct_len", report.construct_len);
  if (report.mdl_disagreement.n > 0) summary("mdl_disagreement", report.mdl_disagreement);
  line("log_m_bbar", format_real(report.log_m_bbar));
  if (report.band) {
    line("band_center", format_real(report.band->value));
    line("band_low", format_real(*report.band->band_low));
    line("band_high", format_real(*report.band->band_high));
  }
  if (report.in_band) line("in_band", *report.in_band ? "1" : "0");
  line("lemma41_bound", format_real(report.lemma41_bound));
  line("lemma41_slack", format_real(report.lemma41_slack));
  line("lemma41_ok", report.lemma41_ok ? "1" : "0");
  if (report.lemma42_ok) {
    line("lemma42_kl", format_real(*report.lemma42_kl));
    line("lemma42_budget", format_real(*report.lemma42_budget));
    line("lemma42_sigma", format_real(*report.lemma42_sigma));
    line("lemma42_ok", *report.lemma42_ok ? "1" : "0");
  }
}

std::vector<CurveRow> figure1_curves(double step) {
  if (!(step > 0.0 && step <= 0.1)) throw PreconditionError("curve step must lie in (0, 0.1]");
  std::vector<CurveRow> rows;
  for (std::size_t i = 0;; ++i) {
    double a = static_cast<double>(i) * step;
    if (a > 0.5 - 1e-12) a = 0.5;
    rows.push_back({a, l_ag(Prob(a)).value(), l_samp(Prob(a)).value()});
    if (a == 0.5) break;
  }
  return rows;
}

void write_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << "alpha,l_ag,l_samp\n";
  for (const auto& r : rows) {
    out << format_real(r.alpha) << ',' << format_real(r.l_ag) << ',' << format_real(r.l_samp)
        << '\n';
  }
}

bool LemmaReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.passed; });
}

LemmaReport verify_lemmas() {
  constexpr double kTol = 1e-9;
  LemmaReport rep;
  const auto fmt = [](const char* pattern, auto... args) {
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return std::string(buf);
  };

  {
    LemmaCheck c{"lemma_a4", 0, INFINITY, "", false};
    for (int i = 0; i <= 1000; ++i) {
      for (int j = 0; j <= 800; ++j) {
        const double a = i / 1000.0;
        const double big_c = j / 100.0;
        const double g = lemma_a4_gap(Prob(a), big_c);
        ++c.evaluated;
        if (g < c.worst) {
          c.worst = g;
          c.where = fmt("alpha=%.3f C=%.2f", a, big_c);
        }
      }
    }
    c.passed = c.worst >= -kTol;
    rep.checks.push_back(c);
  }
  {
    LemmaCheck c{"lemma_a5", 0, INFINITY, "", false};
    for (int i = 1; i <= 99; ++i) {
      for (int j = 1; j <= 99; ++j) {
        const double a = i / 100.0;
        const double b = j / 100.0;
        const double g = strong_pinsker_gap(Prob(a), Prob(b));
        ++c.evaluated;
        if (g < c.worst) {
          c.worst = g;
          c.where = fmt("alpha=%.2f beta=%.2f", a, b);
        }
      }
    }
    c.passed = c.worst >= -kTol;
    rep.checks.push_back(c);
  }
  {
    LemmaCheck c{"lemma_a6", 0, INFINITY, "", false};
    for (std::uint64_t m = 1; m <= 200; ++m) {
      for (std::uint64_t k = 0; k <= m; ++k) {
        for (std::uint64_t kp = 0; kp <= k; ++kp) {
          for (std::uint64_t km = 0; km <= m - k && kp + km < m; ++km) {
            const double g = lemma_a6_gap(m, kp, km, k);
            ++c.evaluated;
            if (g < c.worst) {
              c.worst = g;
              c.where = fmt("m=%llu k=%llu k+=%llu k-=%llu", static_cast<unsigned long long>(m),
                            static_cast<unsigned long long>(k), static_cast<unsigned long long>(kp),
                            static_cast<unsigned long long>(km));
            }
          }
        }
      }
    }
    c.passed = c.worst >= -kTol;
    rep.checks.push_back(c);
  }
  {
    LemmaCheck c{"union_bound", 0, -INFINITY, "", false};
    for (std::uint64_t m = 1; m <= 64; ++m) {
      for (std::uint64_t k = 0; k <= m; ++k) {
        for (std::uint64_t b = 1; b <= 64; ++b) {
          if (b < 63 && (std::uint64_t{1} << b) < m) continue;
          const double v = union_bound_log_fail(m, k, b, seed_length_r(m, k, b));
          ++c.evaluated;
          if (v > c.worst) {
            c.worst = v;
            c.where = fmt("m=%llu k=%llu b=%llu", static_cast<unsigned long long>(m),
                          static_cast<unsigned long long>(k), static_cast<unsigned long long>(b));
          }
        }
      }
    }
    c.passed = c.worst < 0.0;
    rep.checks.push_back(c);
  }
  rep.union_spot = union_bound_log_fail(4, 2, 8, 10);
  rep.checks.push_back(
      {"union_bound_spot", 1, rep.union_spot, "m=4 k=2 b=8 r=10", std::abs(rep.union_spot + 65.4) <= 0.5});
  return rep;
}

void write_lemma_report(std::ostream& out, const LemmaReport& report) {
  out << "check,evaluated,worst,where,passed\n";
  for (const auto& c : report.checks) {
    char worst[64];
    std::snprintf(worst, sizeof worst, "%.6g", c.worst);
    out << c.name << ',' << c.evaluated << ',' << worst << ',' << csv_field(c.where) << ','
        << (c.passed ? 1 : 0) << '\n';
  }
}

HashDemoReport hash_demo(std::uint64_t m, std::uint64_t k, std::uint64_t b, std::size_t trials,
                         std::uint64_t master_seed, unsigned workers) {
  if (m == 0 || k > m) throw PreconditionError("hash_demo requires m >= 1 and k <= m");
  if (b == 0 || b > kMaxPrefix) throw PreconditionError("hash_demo requires 1 <= b <= 64");
  if (b < 64 && (std::uint64_t{1} << b) < m) throw PreconditionError("hash_demo requires 2^b >= m");
  if (trials == 0) throw PreconditionError("hash_demo requires trials >= 1");
  HashDemoReport rep;
  rep.m = m;
  rep.k = k;
  rep.b = b;
  rep.budget = seed_length_r(m, k, b);
  if (rep.budget > 63) throw PreconditionError("seed budget above 63 bits is out of reach");
  rep.certificate = union_bound_log_fail(m, k, b, rep.budget);
  rep.trials.resize(trials);

  parallel_for(trials, workers, [&](std::size_t t) {
    HashDemoTrial& out = rep.trials[t];
    out.trial = t;
    std::vector<HashTarget> targets;
    Sample s;
    std::set<std::uint64_t> used;
    for (std::uint64_t i = 0; targets.size() < m; ++i) {
      const std::uint64_t x = stream_word(master_seed, Stream::kHashDemo, t, i, 0) >> (64 - b);
      if (!used.insert(x).second) continue;
      const bool y = targets.size() < k;
      targets.push_back({BitString::from_uint(x, static_cast<unsigned>(b)), y});
      s.examples.push_back({Instance::from_word(b == 64 ? x : x << (64 - b)), y});
    }
    out.seed = find_seed(targets, static_cast<unsigned>(rep.budget));
    out.found = out.seed.has_value();
    if (!out.found) return;
    try {
      const Interpolator ip = assemble_interpolator(Expr::zero(), s);
      out.assembled = true;
      out.interpolates = train_error(ip.program, s) == 0.0;
      out.code_len = ip.code_len;
      out.accounted_len = interpolator_code_length(code_length(Expr::zero()), ip.params, ip.seed.size());
    } catch (const ConstructionError&) {
    }
  });

  std::size_t found = 0;
  double seed_len = 0.0;
  for (const auto& t : rep.trials) {
    if (!t.found) continue;
    ++found;
    seed_len += static_cast<double>(t.seed->size());
    rep.assembly_ok = rep.assembly_ok && t.assembled && t.interpolates && t.code_len == t.accounted_len;
  }
  rep.success_rate = static_cast<double>(found) / static_cast<double>(trials);
  rep.mean_seed_len = found > 0 ? seed_len / static_cast<double>(found) : 0.0;
  return rep;
}

void write_hash_demo_csv(std::ostream& out, const HashDemoReport& report) {
  out << "trial,m,k,b,budget,found,seed_len,seed,assembled,interpolates,code_len,accounted_len\n";
  for (const auto& t : report.trials) {
    out << t.trial << ',' << report.m << ',' << report.k << ',' << report.b << ',' << report.budget
        << ',' << (t.found ? 1 : 0) << ',';
    if (t.seed) out << t.seed->size() << ',' << t.seed->to_string();
    else out << ',';
    out << ',' << (t.assembled ? 1 : 0) << ',' << (t.interpolates ? 1 : 0) << ',' << t.code_len
        << ',' << t.accounted_len << '\n';
  }
}

bool LowerBoundReport::verified() const {
  return found && none_interpolate && mdl_len.has_value() && *mdl_len >= budget;
}

LowerBoundReport lower_bound_demo(unsigned b, unsigned budget) {
  LowerBoundReport rep;
  rep.b = b;
  rep.budget = budget;
  const auto pair = lower_bound_pair(b, budget);
  if (!pair) return rep;
  rep.found = true;
  rep.x1 = pair->first;
  rep.x2 = pair->second;

  const std::vector<Expr> programs = programs_shorter_than(budget);
  rep.programs_checked = programs.size();
  rep.none_interpolate = std::none_of(programs.begin(), programs.end(), [&](const Expr& h) {
    return !eval(h, rep.x1) && eval(h, rep.x2);
  });

  Sample s;
  s.examples = {{rep.x1, false}, {rep.x2, true}};
  // Not(Bit(i)) for any i <= 24 is at most 15 bits, so this budget always suffices.
  const LearnerResult mdl = mdl_search(s, std::max(budget, 16U));
  if (mdl.program) {
    rep.mdl_len = mdl.code_len;
    rep.mdl_program = *mdl.program;
  }
  return rep;
}

void write_lower_bound_report(std::ostream& out, const LowerBoundReport& report) {
  out << "b=" << report.b << '\n' << "budget=" << report.budget << '\n'
      << "found=" << (report.found ? 1 : 0) << '\n';
  if (!report.found) return;
  out << "x1=" << report.x1.prefix(report.b).to_string() << '\n'
      << "x2=" << report.x2.prefix(report.b).to_string() << '\n'
      << "programs_checked=" << report.programs_checked << '\n'
      << "none_interpolate=" << (report.none_interpolate ? 1 : 0) << '\n';
  if (report.mdl_program) {
    out << "mdl_len=" << *report.mdl_len << '\n'
        << "mdl_program=" << encode(*report.mdl_program).serialize() << '\n'
        << "mdl_expr=" << report.mdl_program->to_string() << '\n';
  }
  out << "verified=" << (report.verified() ? 1 : 0) << '\n';
}

QuenchRow quench(const SourceSpec& spec, std::size_t m, std::size_t trials) {
  if (m < 2) throw PreconditionError("quench requires m >= 2");
  QuenchRow row;
  row.m = m;
  row.trials = trials;
  row.estimate = quenched_estimate(spec, m, trials).value();
  row.reference = std::log2(4.0 * std::log2(static_cast<double>(m)));
  return row;
}

void write_quench_csv(std::ostream& out, const std::vector<QuenchRow>& rows) {
  out << "m,trials,estimate,reference\n";
  for (const auto& r : rows) {
    out << r.m << ',' << r.trials << ',' << format_real(r.estimate) << ','
        << format_real(r.reference) << '\n';
  }
}

}  // namespace mdl
