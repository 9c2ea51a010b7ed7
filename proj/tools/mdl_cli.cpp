// Command-line front end for the experiment harness.
//
// Exit codes: 0 success, 1 failed verification, 2 usage error.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "mdl/errors.hpp"
#include "mdl/experiments.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

// Flag values keyed by setting name; only flags given on the command line are kept.
struct FlagSet {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options[key] = app->add_option(flag, values[key], help);
  }

  mdl::Settings given() const {
    mdl::Settings out;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) out[key] = values.at(key);
    }
    return out;
  }
};

void add_source_flags(CLI::App* app, FlagSet& f) {
  f.add(app, "--source", "source", "rln | mixture | zeros | sparse");
  f.add(app, "--lstar-num", "lstar_num", "label noise numerator");
  f.add(app, "--lstar-den", "lstar_den", "label noise denominator");
  f.add(app, "--hstar", "hstar", "target program as len:hex");
  f.add(app, "--alpha", "alpha", "mixture P(x1 = 1)");
  f.add(app, "--beta", "beta", "mixture label bias");
  f.add(app, "--c", "c", "sparse bit-density constant");
  f.add(app, "--seed", "master_seed", "master seed");
}

// Config-file values overridden by explicit flags.
mdl::Settings merged(const std::string& config_path, const FlagSet& flags) {
  mdl::Settings s;
  if (!config_path.empty()) s = mdl::load_settings(config_path);
  if (const auto it = s.find("seed"); it != s.end()) {
    s["master_seed"] = it->second;
    s.erase(it);
  }
  for (const auto& [k, v] : flags.given()) s[k] = v;
  return s;
}

std::string take(mdl::Settings& s, const std::string& key, const std::string& fallback = "") {
  const auto it = s.find(key);
  if (it == s.end()) return fallback;
  std::string v = it->second;
  s.erase(it);
  return v;
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
    throw mdl::PreconditionError("cannot parse " + key + "=" + text);
  }
  return v;
}

// Writes through `emit` to the file at path, or to stdout when path is empty or "-".
template <class F>
void with_output(const std::string& path, F&& emit) {
  if (path.empty() || path == "-") {
    emit(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw mdl::PreconditionError("cannot open output file " + path);
  emit(out);
}

int cmd_curves(mdl::Settings s) {
  const std::string out = take(s, "out");
  const double step = std::stod(take(s, "step", "0.01"));
  const auto rows = mdl::figure1_curves(step);
  with_output(out, [&](std::ostream& os) { mdl::write_curves_csv(os, rows); });
  return kOk;
}

int cmd_verify(mdl::Settings s) {
  const std::string out = take(s, "out");
  const auto rep = mdl::verify_lemmas();
  with_output(out, [&](std::ostream& os) { mdl::write_lemma_report(os, rep); });
  return rep.all_passed() ? kOk : kFailed;
}

int cmd_simulate(mdl::Settings s) {
  const std::string out = take(s, "out");
  const std::string summary = take(s, "summary");
  const mdl::ExperimentConfig config = mdl::experiment_config(s);
  const auto rep = mdl::run_experiment(config);
  with_output(out, [&](std::ostream& os) { mdl::write_trials_csv(os, rep); });
  if (!summary.empty() || (!out.empty() && out != "-")) {
    with_output(summary, [&](std::ostream& os) { mdl::write_summary(os, rep); });
  }
  return rep.audits_ok() ? kOk : kFailed;
}

int cmd_hash_demo(mdl::Settings s) {
  const std::string out = take(s, "out");
  const auto m = to_u64("m", take(s, "m", "8"));
  const auto k = to_u64("k", take(s, "k", "4"));
  const auto b = to_u64("b", take(s, "b", "12"));
  const auto trials = to_u64("trials", take(s, "trials", "200"));
  const auto seed = to_u64("seed", take(s, "master_seed", "0"));
  const auto rep = mdl::hash_demo(m, k, b, trials, seed);
  if (!out.empty()) with_output(out, [&](std::ostream& os) { mdl::write_hash_demo_csv(os, rep); });
  std::cout << "m=" << rep.m << "\nk=" << rep.k << "\nb=" << rep.b << "\nbudget=" << rep.budget
            << "\ntrials=" << rep.trials.size()
            << "\nsuccess_rate=" << mdl::format_real(rep.success_rate)
            << "\nmean_seed_len=" << mdl::format_real(rep.mean_seed_len)
            << "\ncertificate=" << mdl::format_real(rep.certificate)
            << "\nassembly_ok=" << (rep.assembly_ok ? 1 : 0) << '\n';
  return rep.assembly_ok && rep.certificate < 0.0 ? kOk : kFailed;
}

int cmd_lower_bound(mdl::Settings s) {
  const auto b = static_cast<unsigned>(to_u64("b", take(s, "b", "8")));
  const auto budget = static_cast<unsigned>(to_u64("budget", take(s, "budget", "3")));
  const auto rep = mdl::lower_bound_demo(b, budget);
  mdl::write_lower_bound_report(std::cout, rep);
  if (!rep.found) std::cerr << "no pair found: every fingerprint is distinct\n";
  return rep.verified() ? kOk : kFailed;
}

int cmd_quench(mdl::Settings s, const std::vector<std::size_t>& ms) {
  const std::string out = take(s, "out");
  const auto trials = to_u64("trials", take(s, "trials", "100"));
  const std::string m_setting = take(s, "m");
  std::vector<std::size_t> sizes = ms;
  if (sizes.empty()) sizes.push_back(m_setting.empty() ? 64 : to_u64("m", m_setting));
  const mdl::SourceSpec spec = mdl::parse_source(s);
  std::vector<mdl::QuenchRow> rows;
  for (const auto m : sizes) rows.push_back(mdl::quench(spec, m, trials));
  with_output(out, [&](std::ostream& os) { mdl::write_quench_csv(os, rows); });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpolating MDL experiment harness"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value settings file; flags override it");
  app.fallthrough();

  FlagSet curves_f, verify_f, sim_f, hash_f, lb_f, quench_f;

  auto* curves = app.add_subcommand("curves", "Write l_ag and l_samp on an alpha grid");
  curves_f.add(curves, "--step", "step", "alpha grid step in (0, 0.1]");
  curves_f.add(curves, "--out", "out", "output CSV (default stdout)");

  auto* verify = app.add_subcommand("verify-lemmas", "Grid-check the auxiliary inequalities");
  verify_f.add(verify, "--out", "out", "output CSV (default stdout)");

  auto* sim = app.add_subcommand("simulate", "Run seeded MDL/SRM trials");
  add_source_flags(sim, sim_f);
  sim_f.add(sim, "--m", "m", "sample size");
  sim_f.add(sim, "--trials", "trials", "number of trials");
  sim_f.add(sim, "--max-len", "max_len", "program length budget");
  sim_f.add(sim, "--lambda", "lambda", "SRM penalty weight");
  sim_f.add(sim, "--c-big", "c_big", "constant in the band");
  sim_f.add(sim, "--n-test", "n_test", "Monte Carlo test size");
  sim_f.add(sim, "--workers", "workers", "threads (0 = all cores)");
  sim_f.add(sim, "--out", "out", "per-trial CSV (default stdout)");
  sim_f.add(sim, "--summary", "summary", "summary file (default stdout when --out is a file)");

  auto* hash = app.add_subcommand("hash-demo", "Seed search statistics for random targets");
  hash_f.add(hash, "--m", "m", "number of targets");
  hash_f.add(hash, "--k", "k", "number of ones");
  hash_f.add(hash, "--b", "b", "prefix length");
  hash_f.add(hash, "--trials", "trials", "number of target sets");
  hash_f.add(hash, "--seed", "master_seed", "master seed");
  hash_f.add(hash, "--out", "out", "per-trial CSV");

  auto* lb = app.add_subcommand("lower-bound", "Pair that no short program interpolates");
  lb_f.add(lb, "--b", "b", "instance prefix length");
  lb_f.add(lb, "--budget", "budget", "program length budget");

  std::vector<std::size_t> quench_ms;
  auto* q = app.add_subcommand("quench", "Quenched disambiguation-prefix estimate");
  add_source_flags(q, quench_f);
  q->add_option("--m", quench_ms, "sample sizes (repeatable)");
  quench_f.add(q, "--trials", "trials", "samples per estimate");
  quench_f.add(q, "--out", "out", "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*curves) return cmd_curves(merged(config_path, curves_f));
    if (*verify) return cmd_verify(merged(config_path, verify_f));
    if (*sim) return cmd_simulate(merged(config_path, sim_f));
    if (*hash) return cmd_hash_demo(merged(config_path, hash_f));
    if (*lb) return cmd_lower_bound(merged(config_path, lb_f));
    if (*q) return cmd_quench(merged(config_path, quench_f), quench_ms);
  } catch (const mdl::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const mdl::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
