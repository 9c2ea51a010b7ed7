#include "mdl/hash_family.hpp"

#include <bit>
#include <set>

#include "mdl/core_math.hpp"
#include "mdl/errors.hpp"
#include "mdl/sources.hpp"

namespace mdl {

namespace {

__extension__ typedef unsigned __int128 u128;

constexpr std::uint64_t low_mask(unsigned n) noexcept {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

bool fits_packed(const BitString& bits) { return bits.size() <= 64; }

}  // namespace

void PrfBuilder::append(std::uint64_t value, unsigned n) noexcept {
  while (n > 0) {
    const unsigned space = 64 - fill_;
    const unsigned take = n < space ? n : space;
    const std::uint64_t chunk = (value >> (n - take)) & low_mask(take);
    current_ |= chunk << (space - take);
    fill_ += take;
    n -= take;
    if (fill_ == 64) flush();
  }
}

void PrfBuilder::append_gamma(std::uint64_t n) noexcept {
  const unsigned width = static_cast<unsigned>(std::bit_width(n));
  append(0, width - 1);
  append(n, width);
}

void PrfBuilder::append_bits(const BitString& bits) noexcept {
  for (std::size_t i = 0; i < bits.size(); ++i) append(bits[i] ? 1 : 0, 1);
}

std::uint64_t PrfBuilder::finish() noexcept {
  if (fill_ > 0) flush();
  return mix64(state_);
}

void PrfBuilder::flush() noexcept {
  ++words_;
  state_ = mix64(state_ ^ current_ ^ (words_ * kGoldenGamma));
  current_ = 0;
  fill_ = 0;
}

std::uint64_t prf64(const BitString& seed, const BitString& x_prefix) {
  PrfBuilder sink;
  sink.append_gamma(seed.size() + 1);
  sink.append_bits(seed);
  sink.append_gamma(x_prefix.size() + 1);
  sink.append_bits(x_prefix);
  return sink.finish();
}

std::uint64_t prf64_packed(std::uint64_t seed, unsigned seed_len, std::uint64_t x_prefix,
                           unsigned prefix_len) noexcept {
  PrfBuilder sink;
  sink.append_gamma(std::uint64_t{seed_len} + 1);
  sink.append(seed, seed_len);
  sink.append_gamma(std::uint64_t{prefix_len} + 1);
  sink.append(x_prefix, prefix_len);
  return sink.finish();
}

std::uint64_t hash_threshold(std::uint64_t k, std::uint64_t m) {
  if (m == 0 || k > m) throw PreconditionError("hash threshold requires 0 <= k <= m, m >= 1");
  if (k == m) return ~std::uint64_t{0};
  const u128 scaled = static_cast<u128>(k) << 64;
  return static_cast<std::uint64_t>(scaled / m);
}

bool hash_predict(const BitString& seed, std::uint64_t k, std::uint64_t m,
                  const BitString& x_prefix) {
  const std::uint64_t threshold = hash_threshold(k, m);
  if (k == m) return true;
  return prf64(seed, x_prefix) < threshold;
}

bool hash_predict_packed(std::uint64_t seed, unsigned seed_len, std::uint64_t k, std::uint64_t m,
                         std::uint64_t x_prefix, unsigned prefix_len) {
  const std::uint64_t threshold = hash_threshold(k, m);
  if (k == m) return true;
  return prf64_packed(seed, seed_len, x_prefix, prefix_len) < threshold;
}

std::optional<BitString> find_seed(std::span<const HashTarget> targets, unsigned max_len) {
  if (max_len > 63) throw PreconditionError("find_seed supports seeds of at most 63 bits");
  if (targets.empty()) return BitString{};
  {
    std::set<BitString> seen;
    for (const auto& t : targets) {
      if (!seen.insert(t.x_prefix).second) {
        throw PreconditionError("find_seed requires pairwise distinct instance prefixes");
      }
    }
  }
  const std::uint64_t m = targets.size();
  std::uint64_t k = 0;
  for (const auto& t : targets) k += t.y ? 1 : 0;

  bool packed = true;
  for (const auto& t : targets) packed = packed && fits_packed(t.x_prefix);

  struct Packed {
    std::uint64_t word;
    unsigned len;
    bool y;
  };
  std::vector<Packed> fast;
  if (packed) {
    fast.reserve(targets.size());
    for (const auto& t : targets) {
      fast.push_back({t.x_prefix.to_uint(), static_cast<unsigned>(t.x_prefix.size()), t.y});
    }
  }

  for (unsigned len = 0; len <= max_len; ++len) {
    const std::uint64_t count = std::uint64_t{1} << len;
    for (std::uint64_t seed = 0; seed < count; ++seed) {
      bool ok = true;
      if (packed) {
        for (const auto& t : fast) {
          if (hash_predict_packed(seed, len, k, m, t.word, t.len) != t.y) {
            ok = false;
            break;
          }
        }
      } else {
        const BitString seed_bits = BitString::from_uint(seed, len);
        for (const auto& t : targets) {
          if (hash_predict(seed_bits, k, m, t.x_prefix) != t.y) {
            ok = false;
            break;
          }
        }
      }
      if (ok) return BitString::from_uint(seed, len);
    }
  }
  return std::nullopt;
}

std::vector<HashTarget> dedupe(std::span<const HashTarget> targets) {
  std::vector<HashTarget> out;
  std::set<std::pair<BitString, bool>> seen_pairs;
  std::set<BitString> seen_prefixes;
  for (const auto& t : targets) {
    if (seen_pairs.contains({t.x_prefix, t.y})) continue;
    if (seen_prefixes.contains(t.x_prefix)) {
      throw InconsistencyError("instance prefix " + t.x_prefix.to_string() +
                               " appears with both labels");
    }
    seen_pairs.insert({t.x_prefix, t.y});
    seen_prefixes.insert(t.x_prefix);
    out.push_back(t);
  }
  return out;
}

std::size_t interpolator_code_length(std::size_t ref_len, const HashParams& params,
                                     std::size_t seed_len) {
  return 3 + ref_len + 4 + gamma_length(params.m) + gamma_length(params.k + 1) +
         gamma_length(params.b) + gamma_length(seed_len + 1) + seed_len;
}

Interpolator assemble_interpolator(const Expr& h_ref, const Sample& sample) {
  if (sample.examples.empty()) throw PreconditionError("assemble_interpolator needs m >= 1");
  const unsigned b = std::max(1U, disambiguation_prefix(sample));
  std::vector<HashTarget> targets;
  targets.reserve(sample.examples.size());
  for (const auto& ex : sample.examples) {
    targets.push_back({ex.x.prefix(b), ex.y != eval(h_ref, ex.x)});
  }
  const std::vector<HashTarget> unique = dedupe(targets);
  HashParams params{unique.size(), 0, b};
  for (const auto& t : unique) params.k += t.y ? 1 : 0;

  const std::uint64_t budget = seed_length_r(params.m, params.k, params.b);
  const auto seed = find_seed(unique, static_cast<unsigned>(budget + kSeedSlack));
  if (!seed) {
    throw ConstructionError("no seed of length <= " + std::to_string(budget + kSeedSlack) +
                            " interpolates the residuals");
  }
  Interpolator out{Expr::exclusive_or(h_ref, Expr::hash(params.m, params.k, params.b, *seed)),
                   params, *seed, budget, 0};
  out.code_len = encode(out.program).length();
  return out;
}

}  // namespace mdl
