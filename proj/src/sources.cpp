#include "mdl/sources.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mdl/errors.hpp"
#include "mdl/hash_family.hpp"

namespace mdl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t rational_threshold(std::uint64_t num, std::uint64_t den) {
  return hash_threshold(num, den);
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw PreconditionError("cannot parse " + key + "=" + text);
  }
  if (used != text.size()) throw PreconditionError("cannot parse " + key + "=" + text);
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    throw PreconditionError("cannot parse " + key + "=" + text);
  }
  if (used != text.size() || text.front() == '-') {
    throw PreconditionError("cannot parse " + key + "=" + text);
  }
  return v;
}

}  // namespace

void SourceSpec::validate() const {
  std::visit(Overloaded{
                 [](const RandomLabelNoise& s) {
                   if (s.lstar_den == 0) throw PreconditionError("lstar_den must be positive");
                   if (2 * s.lstar_num >= s.lstar_den) {
                     throw PreconditionError("label noise must satisfy L* < 1/2");
                   }
                   if (max_dependency(s.h_star) > kMaxPrefix) {
                     throw PreconditionError("h* reads beyond the observable prefix");
                   }
                 },
                 [](const AgnosticMixture& s) {
                   if (!(s.alpha >= 0.0 && s.alpha <= 1.0 && s.beta >= 0.0 && s.beta <= 1.0)) {
                     throw PreconditionError("mixture parameters must lie in [0, 1]");
                   }
                 },
                 [](const AllZerosY&) {},
                 [](const SparseDiff& s) {
                   if (!(s.c > 0.0)) throw PreconditionError("sparse source needs c > 0");
                 },
             },
             variant);
}

std::string SourceSpec::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const RandomLabelNoise& s) {
                   out << "source=rln lstar=" << s.lstar_num << '/' << s.lstar_den
                       << " hstar=" << encode(s.h_star).serialize();
                 },
                 [&](const AgnosticMixture& s) {
                   out << "source=mixture alpha=" << s.alpha << " beta=" << s.beta;
                 },
                 [&](const AllZerosY&) { out << "source=zeros"; },
                 [&](const SparseDiff& s) { out << "source=sparse c=" << s.c; },
             },
             variant);
  out << " master_seed=" << master_seed;
  return out.str();
}

std::uint64_t stream_word(std::uint64_t master_seed, Stream stream, std::uint64_t trial,
                          std::uint64_t i, std::uint64_t j) {
  PrfBuilder prf;
  prf.append_gamma(64 + 1);
  prf.append(master_seed, 64);
  prf.append_gamma(8 + 64 + 64 + 8 + 1);
  prf.append(static_cast<std::uint64_t>(stream), 8);
  prf.append(trial, 64);
  prf.append(i, 64);
  prf.append(j & 0xFF, 8);
  return prf.finish();
}

std::uint64_t bernoulli_threshold(double p) {
  if (!(p > 0.0)) return 0;
  if (p >= 1.0) return ~std::uint64_t{0};
  const long double scaled = std::ldexp(static_cast<long double>(p), 64);
  if (scaled >= std::ldexp(1.0L, 64)) return ~std::uint64_t{0};
  return static_cast<std::uint64_t>(scaled);
}

bool bernoulli_draw(std::uint64_t word, double p) {
  if (p >= 1.0) return true;
  return word < bernoulli_threshold(p);
}

void check_interpolable(const Sample& s) {
  std::vector<Example> sorted = s.examples;
  std::sort(sorted.begin(), sorted.end(), [](const Example& a, const Example& b) {
    return a.x.word() != b.x.word() ? a.x.word() < b.x.word() : a.y < b.y;
  });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].x == sorted[i - 1].x && sorted[i].y != sorted[i - 1].y) {
      throw InconsistencyError("sample contains one instance with both labels");
    }
  }
}

double bit_probability(const SourceSpec& spec, unsigned i) {
  if (i == 0 || i > kMaxPrefix) throw CapacityError("bit index outside [1, 64]");
  return std::visit(Overloaded{
                        [&](const AgnosticMixture& s) { return i == 1 ? s.alpha : 0.5; },
                        [&](const SparseDiff& s) {
                          return std::min(0.5, s.c / static_cast<double>(i));
                        },
                        [](const auto&) { return 0.5; },
                    },
                    spec.variant);
}

Instance draw_instance(const SourceSpec& spec, Stream stream, std::uint64_t trial,
                       std::uint64_t index) {
  Instance x;
  for (unsigned j = 1; j <= kMaxPrefix; ++j) {
    const std::uint64_t word = stream_word(spec.master_seed, stream, trial, index, j);
    x.set_bit(j, bernoulli_draw(word, bit_probability(spec, j)));
  }
  return x;
}

bool draw_label(const SourceSpec& spec, const Instance& x, Stream stream, std::uint64_t trial,
                std::uint64_t index) {
  const auto noise = [&] { return stream_word(spec.master_seed, stream, trial, index, 0); };
  return std::visit(Overloaded{
                        [&](const RandomLabelNoise& s) {
                          const bool flip = s.lstar_num > 0 &&
                                            noise() < rational_threshold(s.lstar_num, s.lstar_den);
                          return eval(s.h_star, x) != flip;
                        },
                        [&](const AgnosticMixture& s) {
                          return x.bit(1) ? bernoulli_draw(noise(), s.beta) : x.bit(2);
                        },
                        [](const AllZerosY&) { return false; },
                        [&](const SparseDiff&) { return x.bit(1); },
                    },
                    spec.variant);
}

Sample sample(const SourceSpec& spec, std::size_t m, std::uint64_t trial) {
  if (m == 0) throw PreconditionError("sample requires m >= 1");
  spec.validate();
  Sample s;
  s.examples.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Example ex;
    ex.x = draw_instance(spec, Stream::kTrainInstance, trial, i);
    ex.y = draw_label(spec, ex.x, Stream::kTrainLabel, trial, i);
    s.examples.push_back(ex);
  }
  check_interpolable(s);
  return s;
}

unsigned disambiguation_prefix(const Sample& s) {
  // Among distinct pairs, the longest common prefix is attained by neighbours
  // in sorted instance order, so b(S) = 1 + max neighbour LCP over distinct pairs.
  std::vector<Example> sorted = s.examples;
  std::sort(sorted.begin(), sorted.end(), [](const Example& a, const Example& b) {
    return a.x.word() != b.x.word() ? a.x.word() < b.x.word() : a.y < b.y;
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  unsigned b = 0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const unsigned lcp = common_prefix_length(sorted[i - 1].x, sorted[i].x);
    if (lcp >= kMaxPrefix) {
      throw CapacityError("instances agree on every observable bit but carry different labels");
    }
    b = std::max(b, lcp + 1);
  }
  return b;
}

Bits quenched_estimate(const SourceSpec& spec, std::size_t m, std::size_t trials) {
  if (trials == 0) throw PreconditionError("quenched_estimate requires trials >= 1");
  double acc = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const unsigned b = disambiguation_prefix(sample(spec, m, t));
    if (b > 0) acc += std::log2(static_cast<double>(b));
  }
  return Bits(acc / static_cast<double>(trials));
}

Bits min_entropy_prefix(const SourceSpec& spec, unsigned b) {
  if (b > kMaxPrefix) throw CapacityError("prefix longer than capacity");
  double acc = 0.0;
  for (unsigned i = 1; i <= b; ++i) {
    const double p = bit_probability(spec, i);
    acc -= std::log2(std::max(p, 1.0 - p));
  }
  return Bits(std::max(acc, 0.0));
}

Prob bayes_error(const SourceSpec& spec) {
  return std::visit(Overloaded{
                        [](const RandomLabelNoise& s) {
                          return Prob(static_cast<double>(s.lstar_num) /
                                      static_cast<double>(s.lstar_den));
                        },
                        [](const AgnosticMixture& s) { return Prob(s.alpha * s.beta); },
                        [](const auto&) { return Prob(0.0); },
                    },
                    spec.variant);
}

std::optional<Prob> asymptotic_mdl_error(const SourceSpec& spec) {
  return std::visit(Overloaded{
                        [](const RandomLabelNoise& s) -> std::optional<Prob> {
                          return l_samp(Prob(static_cast<double>(s.lstar_num) /
                                             static_cast<double>(s.lstar_den)));
                        },
                        [](const AgnosticMixture& s) -> std::optional<Prob> {
                          return Prob(2.0 * s.alpha * s.beta * (1.0 - s.beta));
                        },
                        [](const auto&) -> std::optional<Prob> { return std::nullopt; },
                    },
                    spec.variant);
}

std::optional<Prob> label_noise(const SourceSpec& spec) {
  if (const auto* s = std::get_if<RandomLabelNoise>(&spec.variant)) {
    return Prob(static_cast<double>(s->lstar_num) / static_cast<double>(s->lstar_den));
  }
  return std::nullopt;
}

SourceSpec parse_source(const std::map<std::string, std::string>& settings) {
  const auto get = [&](const std::string& key) -> const std::string* {
    const auto it = settings.find(key);
    return it == settings.end() ? nullptr : &it->second;
  };
  SourceSpec spec;
  const std::string kind = get("source") ? *get("source") : "rln";
  if (kind == "rln") {
    RandomLabelNoise s;
    if (const auto* v = get("lstar_num")) s.lstar_num = parse_u64("lstar_num", *v);
    if (const auto* v = get("lstar_den")) s.lstar_den = parse_u64("lstar_den", *v);
    if (const auto* v = get("hstar")) s.h_star = decode(ProgramCode::parse(*v).bits);
    spec.variant = s;
  } else if (kind == "mixture") {
    AgnosticMixture s;
    if (const auto* v = get("alpha")) s.alpha = parse_double("alpha", *v);
    if (const auto* v = get("beta")) s.beta = parse_double("beta", *v);
    spec.variant = s;
  } else if (kind == "zeros") {
    spec.variant = AllZerosY{};
  } else if (kind == "sparse") {
    SparseDiff s;
    if (const auto* v = get("c")) s.c = parse_double("c", *v);
    spec.variant = s;
  } else {
    throw PreconditionError("unknown source '" + kind + "' (expected rln|mixture|zeros|sparse)");
  }
  if (const auto* v = get("master_seed")) spec.master_seed = parse_u64("master_seed", *v);
  spec.validate();
  return spec;
}

}  // namespace mdl
