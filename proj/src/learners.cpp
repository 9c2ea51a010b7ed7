#include "mdl/learners.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <unordered_map>
#include <vector>

#include "mdl/errors.hpp"
#include "mdl/hash_family.hpp"
#include "mdl/program_generator.hpp"

namespace mdl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr detail::GeneratorLimits kObservable{kMaxPrefix, kMaxPrefix, 63};

// Evaluates programs on up to 64 training instances at once; bit i of a value
// is the program output on instance i.
class MaskSemantics {
 public:
  using Value = std::uint64_t;

  explicit MaskSemantics(const Sample& s) : n_(s.m()) {
    full_ = n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
    words_.reserve(n_);
    for (const auto& ex : s.examples) words_.push_back(ex.x.word());
    for (unsigned i = 1; i <= kMaxPrefix; ++i) {
      std::uint64_t mask = 0;
      for (std::size_t j = 0; j < n_; ++j) {
        if ((words_[j] >> (64 - i)) & 1U) mask |= std::uint64_t{1} << j;
      }
      bit_masks_[i] = mask;
    }
  }

  std::uint64_t full() const { return full_; }

  Value zero() { return 0; }
  Value one() { return full_; }
  Value bit(std::uint64_t i) { return bit_masks_[i]; }
  Value negate(Value v) { return ~v & full_; }
  Value exclusive_or(Value a, Value b) { return a ^ b; }
  Value if_then_else(Value c, Value t, Value e) { return (c & t) | (~c & e); }

  Value hash(std::uint64_t m, std::uint64_t k, std::uint64_t b, unsigned seed_len,
             std::uint64_t seed) {
    if (k == 0) return 0;
    if (k == m) return full_;
    if (seed_len <= kCachedSeedBits && m < (1U << 20)) {
      const std::uint64_t key = (m << 44) | (k << 24) | (b << 8) | seed_len;
      auto it = cache_.find(key);
      if (it == cache_.end()) {
        std::vector<std::uint64_t> group(std::size_t{1} << seed_len);
        for (std::uint64_t s = 0; s < group.size(); ++s) {
          group[s] = compute_hash(m, k, static_cast<unsigned>(b), seed_len, s);
        }
        it = cache_.emplace(key, std::move(group)).first;
      }
      return it->second[seed];
    }
    return compute_hash(m, k, static_cast<unsigned>(b), seed_len, seed);
  }

 private:
  static constexpr unsigned kCachedSeedBits = 12;

  std::uint64_t compute_hash(std::uint64_t m, std::uint64_t k, unsigned b, unsigned seed_len,
                             std::uint64_t seed) const {
    const std::uint64_t threshold = hash_threshold(k, m);
    const unsigned shift = 64 - b;
    std::uint64_t mask = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (prf64_packed(seed, seed_len, words_[j] >> shift, b) < threshold) {
        mask |= std::uint64_t{1} << j;
      }
    }
    return mask;
  }

  std::size_t n_;
  std::uint64_t full_ = 0;
  std::vector<std::uint64_t> words_;
  std::array<std::uint64_t, kMaxPrefix + 1> bit_masks_{};
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> cache_;
};

std::uint64_t label_mask(const Sample& s) {
  std::uint64_t mask = 0;
  for (std::size_t j = 0; j < s.m(); ++j) {
    if (s.examples[j].y) mask |= std::uint64_t{1} << j;
  }
  return mask;
}

bool fits_mask_engine(const Sample& s) { return s.m() >= 1 && s.m() <= 64; }

// Fallback for samples wider than one mask word: enumerate and evaluate directly.
template <class OnProgram>
void scan_naive(unsigned len, OnProgram&& on_program) {
  detail::NullSemantics sem;
  detail::ProgramGenerator<detail::NullSemantics> gen(sem, kObservable);
  gen.generate(len, [&](const detail::NullSemantics::Value&, unsigned) {
    if (!on_program(gen.current_expr())) gen.stop();
  });
}

std::size_t count_errors(const Expr& h, const Sample& s, std::size_t give_up_after) {
  std::size_t errors = 0;
  for (const auto& ex : s.examples) {
    if (eval(h, ex.x) != ex.y && ++errors > give_up_after) break;
  }
  return errors;
}

}  // namespace

const char* to_string(LossMode mode) {
  return mode == LossMode::kExact ? "exact" : "monte-carlo";
}

double train_error(const Expr& h, const Sample& s) {
  if (s.m() == 0) throw PreconditionError("train_error needs a nonempty sample");
  return static_cast<double>(count_errors(h, s, s.m())) / static_cast<double>(s.m());
}

LearnerResult mdl_search(const Sample& s, unsigned max_len) {
  if (s.m() == 0) throw PreconditionError("mdl_search needs a nonempty sample");
  if (max_len < 2) throw PreconditionError("mdl_search requires max_len >= 2");
  LearnerResult result;
  result.search_len_budget = max_len;

  if (fits_mask_engine(s)) {
    MaskSemantics sem(s);
    detail::ProgramGenerator<MaskSemantics> gen(sem, kObservable);
    const std::uint64_t target = label_mask(s);
    for (unsigned len = 2; len <= max_len && !result.program; ++len) {
      gen.generate(len, [&](const std::uint64_t& value, unsigned) {
        ++result.programs_scanned;
        if (value == target) {
          result.program = gen.current_expr();
          gen.stop();
        }
      });
      if (result.program) result.code_len = len;
    }
  } else {
    for (unsigned len = 2; len <= max_len && !result.program; ++len) {
      scan_naive(len, [&](const Expr& e) {
        ++result.programs_scanned;
        if (count_errors(e, s, 0) == 0) {
          result.program = e;
          return false;
        }
        return true;
      });
      if (result.program) result.code_len = len;
    }
  }
  result.exhausted = !result.program.has_value();
  return result;
}

double srm_objective(std::size_t errors, std::size_t m, std::size_t len, double lambda) {
  const double md = static_cast<double>(m);
  const double err = static_cast<double>(errors) / md;
  const double rate = static_cast<double>(len) / md;
  return err + lambda * (rate + std::sqrt(err * rate));
}

LearnerResult srm_search(const Sample& s, unsigned max_len, double lambda) {
  if (s.m() == 0) throw PreconditionError("srm_search needs a nonempty sample");
  if (max_len < 2) throw PreconditionError("srm_search requires max_len >= 2");
  if (!(lambda > 0.0)) throw PreconditionError("srm_search requires lambda > 0");
  LearnerResult result;
  result.search_len_budget = max_len;
  const std::size_t m = s.m();
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_errors = 0;

  const auto consider = [&](std::size_t errors, unsigned len, const auto& make_expr) {
    ++result.programs_scanned;
    const double obj = srm_objective(errors, m, len, lambda);
    if (obj < best) {
      best = obj;
      best_errors = errors;
      result.program = make_expr();
      result.code_len = len;
    }
  };

  std::optional<MaskSemantics> sem;
  std::optional<detail::ProgramGenerator<MaskSemantics>> gen;
  if (fits_mask_engine(s)) {
    sem.emplace(s);
    gen.emplace(*sem, kObservable);
  }
  const std::uint64_t target = gen ? label_mask(s) : 0;
  for (unsigned len = 2; len <= max_len; ++len) {
    // Every program of this length or longer has objective >= lambda len / m.
    if (lambda * static_cast<double>(len) / static_cast<double>(m) >= best) break;
    if (gen) {
      gen->generate(len, [&](const std::uint64_t& value, unsigned) {
        consider(static_cast<std::size_t>(std::popcount(value ^ target)), len,
                 [&] { return gen->current_expr(); });
      });
    } else {
      scan_naive(len, [&](const Expr& e) {
        consider(count_errors(e, s, m), len, [&] { return e; });
        return true;
      });
    }
  }
  result.train_error = static_cast<double>(best_errors) / static_cast<double>(m);
  result.exhausted = !result.program.has_value();
  return result;
}

LossEstimate expected_over_instances(const SourceSpec& spec, const std::set<std::uint64_t>& deps,
                                     const std::function<double(const Instance&)>& f,
                                     std::size_t n_test) {
  LossEstimate out;
  if (!deps.empty() && *deps.rbegin() > kMaxPrefix) {
    throw CapacityError("dependency beyond observable prefix");
  }
  if (deps.size() <= kExactLossMaxBits) {
    const std::vector<unsigned> idx(deps.begin(), deps.end());
    std::vector<double> p1(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) p1[j] = bit_probability(spec, idx[j]);
    const std::uint64_t count = std::uint64_t{1} << idx.size();
    double acc = 0.0;
    for (std::uint64_t a = 0; a < count; ++a) {
      Instance x;
      double w = 1.0;
      for (std::size_t j = 0; j < idx.size(); ++j) {
        const bool on = ((a >> j) & 1U) != 0;
        x.set_bit(idx[j], on);
        w *= on ? p1[j] : 1.0 - p1[j];
      }
      if (w > 0.0) acc += w * f(x);
    }
    out.value = std::clamp(acc, 0.0, 1.0);
    out.mode = LossMode::kExact;
    return out;
  }
  if (n_test == 0) throw PreconditionError("Monte Carlo loss needs n_test >= 1");
  // f reads only deps, so the remaining bits of each test instance are left unset.
  // The drawn bits are identical to those of draw_instance.
  std::vector<std::pair<unsigned, double>> bits;
  for (const auto i : deps) {
    const auto j = static_cast<unsigned>(i);
    bits.emplace_back(j, bit_probability(spec, j));
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t t = 0; t < n_test; ++t) {
    Instance x;
    for (const auto& [j, p] : bits) {
      x.set_bit(j, bernoulli_draw(stream_word(spec.master_seed, Stream::kTestInstance, 0, t, j), p));
    }
    const double v = f(x);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(n_test);
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
  out.value = std::clamp(mean, 0.0, 1.0);
  out.mode = LossMode::kMonteCarlo;
  out.n_eval = n_test;
  out.std_err = std::sqrt(var / n);
  return out;
}

LossEstimate population_loss(const Expr& h, const SourceSpec& spec, std::size_t n_test) {
  std::set<std::uint64_t> deps = dependency_bits(h);
  std::function<double(const Instance&)> f;
  std::visit(Overloaded{
                 [&](const RandomLabelNoise& s) {
                   const std::set<std::uint64_t> extra = dependency_bits(s.h_star);
                   deps.insert(extra.begin(), extra.end());
                   const double noise =
                       static_cast<double>(s.lstar_num) / static_cast<double>(s.lstar_den);
                   f = [&h, &s, noise](const Instance& x) {
                     return eval(h, x) == eval(s.h_star, x) ? noise : 1.0 - noise;
                   };
                 },
                 [&](const AgnosticMixture& s) {
                   deps.insert(1);
                   deps.insert(2);
                   const double beta = s.beta;
                   f = [&h, beta](const Instance& x) {
                     const bool pred = eval(h, x);
                     if (!x.bit(1)) return pred != x.bit(2) ? 1.0 : 0.0;
                     return pred ? 1.0 - beta : beta;
                   };
                 },
                 [&](const AllZerosY&) {
                   f = [&h](const Instance& x) { return eval(h, x) ? 1.0 : 0.0; };
                 },
                 [&](const SparseDiff&) {
                   deps.insert(1);
                   f = [&h](const Instance& x) { return eval(h, x) != x.bit(1) ? 1.0 : 0.0; };
                 },
             },
             spec.variant);
  return expected_over_instances(spec, deps, f, n_test);
}

LossEstimate disagreement(const Expr& h, const Expr& ref, const SourceSpec& spec,
                          std::size_t n_test) {
  std::set<std::uint64_t> deps = dependency_bits(h);
  const std::set<std::uint64_t> extra = dependency_bits(ref);
  deps.insert(extra.begin(), extra.end());
  return expected_over_instances(
      spec, deps, [&](const Instance& x) { return eval(h, x) != eval(ref, x) ? 1.0 : 0.0; },
      n_test);
}

std::vector<Expr> programs_shorter_than(unsigned len_budget) {
  std::vector<Expr> out;
  for (unsigned len = 1; len < len_budget; ++len) {
    scan_naive(len, [&](const Expr& e) {
      out.push_back(e);
      return true;
    });
  }
  return out;
}

std::optional<std::pair<Instance, Instance>> lower_bound_pair(unsigned b, unsigned len_budget) {
  if (b == 0 || b > 24) throw PreconditionError("lower_bound_pair supports 1 <= b <= 24");
  if (len_budget == 0) throw PreconditionError("lower_bound_pair requires len_budget >= 1");
  const std::vector<Expr> programs = programs_shorter_than(len_budget);
  std::map<std::vector<bool>, Instance> first_seen;
  const std::uint64_t count = std::uint64_t{1} << b;
  for (std::uint64_t v = 0; v < count; ++v) {
    const Instance x = Instance::from_word(v << (64 - b));
    std::vector<bool> fingerprint;
    fingerprint.reserve(programs.size());
    for (const Expr& h : programs) fingerprint.push_back(eval(h, x));
    const auto [it, inserted] = first_seen.emplace(std::move(fingerprint), x);
    if (!inserted) return std::make_pair(it->second, x);
  }
  return std::nullopt;
}

}  // namespace mdl
