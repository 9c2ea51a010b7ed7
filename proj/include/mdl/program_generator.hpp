#pragma once

// Structural generator of bitlang programs in lexicographic order of their codes.
//
// Because the code is prefix-free, lexicographic order of complete codes is the
// depth-first order of the code trie: operators in opcode order, each operand
// enumerated recursively in the same order, each gamma field in trie order
// (more leading zeros first, then ascending value). The generator walks that
// trie directly and evaluates programs bottom-up through a pluggable semantics,
// so every subexpression value is computed once per enclosing context.
//
// Semantics concept:
//   using Value = ...;
//   Value zero(); Value one(); Value bit(std::uint64_t i);
//   Value negate(const Value&); Value exclusive_or(const Value&, const Value&);
//   Value if_then_else(const Value&, const Value&, const Value&);
//   Value hash(std::uint64_t m, std::uint64_t k, std::uint64_t b,
//              unsigned seed_len, std::uint64_t seed);

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "mdl/bitlang.hpp"

namespace mdl::detail {

/// Non-owning reference to a callable; the referent must outlive the call.
template <class Sig>
class FunctionRef;

template <class R, class... Args>
class FunctionRef<R(Args...)> {
 public:
  template <class F>
    requires(!std::is_same_v<std::remove_cvref_t<F>, FunctionRef>)
  FunctionRef(F&& f) noexcept  // NOLINT(google-explicit-constructor)
      : obj_(const_cast<void*>(static_cast<const void*>(std::addressof(f)))),
        call_([](void* obj, Args... args) -> R {
          return (*static_cast<std::remove_reference_t<F>*>(obj))(std::forward<Args>(args)...);
        }) {}

  R operator()(Args... args) const { return call_(obj_, std::forward<Args>(args)...); }

 private:
  void* obj_;
  R (*call_)(void*, Args...);
};

/// One node of a program in preorder. `value` is the Bit index or the Hash m.
struct Token {
  Op op = Op::kZero;
  std::uint64_t value = 0;
  std::uint64_t k = 0;
  std::uint64_t b = 0;
  unsigned seed_len = 0;
  std::uint64_t seed = 0;
};

/// Rebuilds an expression from a complete preorder token sequence.
Expr expr_from_tokens(std::span<const Token> tokens);

struct GeneratorLimits {
  std::uint64_t max_index = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t max_prefix = std::numeric_limits<std::uint64_t>::max();
  unsigned max_seed_len = 63;
};

/// Lengths reachable by a single expression: 2 and every length >= 4.
constexpr bool length_feasible(unsigned len) noexcept { return len == 2 || len >= 4; }

/// Calls f(n, gamma_length(n)) for n in [1, max_value] with gamma_length(n) <= max_len,
/// in trie order of the gamma codes. Stops early when `stop()` turns true.
template <class F, class Stop>
void for_each_gamma(unsigned max_len, std::uint64_t max_value, F&& f, Stop&& stop) {
  if (max_len == 0 || max_value == 0) return;
  const unsigned top = std::min<unsigned>((max_len - 1) / 2, 62);
  for (unsigned z = top + 1; z-- > 0;) {
    const std::uint64_t lo = std::uint64_t{1} << z;
    if (lo > max_value) continue;
    const std::uint64_t hi = std::min<std::uint64_t>((lo << 1) - 1, max_value);
    for (std::uint64_t n = lo; n <= hi; ++n) {
      f(n, 2 * z + 1);
      if (stop()) return;
    }
  }
}

template <class Sem>
class ProgramGenerator {
 public:
  using Value = typename Sem::Value;
  using Emit = FunctionRef<void(const Value&, unsigned)>;

  explicit ProgramGenerator(Sem& sem, GeneratorLimits limits = {}) : sem_(sem), limits_(limits) {}

  /// Emits every program of exactly `length` bits in lexicographic order, until stop().
  void generate(unsigned length, Emit emit) {
    stopped_ = false;
    trail_.clear();
    gen(length, true, emit);
  }

  /// Requests early termination; callable from inside `emit`.
  void stop() noexcept { stopped_ = true; }
  bool stopped() const noexcept { return stopped_; }

  /// Preorder tokens of the program currently being emitted (valid inside `emit`).
  const std::vector<Token>& trail() const noexcept { return trail_; }
  Expr current_expr() const { return expr_from_tokens(trail_); }

 private:
  static bool fits(unsigned len, unsigned budget, bool exact) {
    return exact ? len == budget : len <= budget;
  }

  void push(Token t) { trail_.push_back(t); }
  void pop() { trail_.pop_back(); }

  void gen(unsigned budget, bool exact, Emit emit) {
    if (stopped_ || budget < 2) return;
    auto stop = [this] { return stopped_; };

    if (fits(2, budget, exact)) {
      push({Op::kZero});
      emit(sem_.zero(), 2);
      pop();
      if (stopped_) return;
      push({Op::kOne});
      emit(sem_.one(), 2);
      pop();
      if (stopped_) return;
    }

    if (budget >= 4) {
      push({Op::kBit});
      for_each_gamma(
          budget - 3, limits_.max_index,
          [&](std::uint64_t i, unsigned gl) {
            if (!fits(3 + gl, budget, exact)) return;
            trail_.back().value = i;
            emit(sem_.bit(i), 3 + gl);
          },
          stop);
      pop();
      if (stopped_) return;
    }

    if (budget >= 5) {
      push({Op::kNot});
      gen(budget - 3, exact, [&](const Value& v, unsigned a) { emit(sem_.negate(v), a + 3); });
      pop();
      if (stopped_) return;
    }

    if (budget >= 7) {
      push({Op::kXor});
      gen(budget - 5, false, [&](const Value& lhs, unsigned a) {
        const unsigned rest = budget - 3 - a;
        if (exact && !length_feasible(rest)) return;
        gen(rest, exact, [&](const Value& rhs, unsigned c) {
          emit(sem_.exclusive_or(lhs, rhs), 3 + a + c);
        });
      });
      pop();
      if (stopped_) return;
    }

    if (budget >= 10) {
      push({Op::kIf});
      gen(budget - 8, false, [&](const Value& cond, unsigned a) {
        gen(budget - 6 - a, false, [&](const Value& then_v, unsigned b) {
          const unsigned rest = budget - 4 - a - b;
          if (exact && !length_feasible(rest)) return;
          gen(rest, exact, [&](const Value& else_v, unsigned c) {
            emit(sem_.if_then_else(cond, then_v, else_v), 4 + a + b + c);
          });
        });
      });
      pop();
      if (stopped_) return;
    }

    if (budget >= 8) gen_hash(budget, exact, emit);
  }

  void gen_hash(unsigned budget, bool exact, Emit emit) {
    auto stop = [this] { return stopped_; };
    const unsigned avail = budget - 4;
    push({Op::kHash});
    // Each of k+1, b, |seed|+1 costs at least one bit.
    for_each_gamma(
        avail - 3, std::numeric_limits<std::uint64_t>::max(),
        [&](std::uint64_t m, unsigned gm) {
          const unsigned a1 = avail - gm;
          for_each_gamma(
              a1 - 2, m + 1,
              [&](std::uint64_t k1, unsigned gk) {
                const unsigned a2 = a1 - gk;
                for_each_gamma(
                    a2 - 1, limits_.max_prefix,
                    [&](std::uint64_t b, unsigned gb) {
                      Token& t = trail_.back();
                      t.value = m;
                      t.k = k1 - 1;
                      t.b = b;
                      gen_seeds(a2 - gb, exact, budget - (a2 - gb), emit);
                    },
                    stop);
              },
              stop);
        },
        stop);
    pop();
  }

  // Seed field: gamma(|seed|+1) then |seed| raw bits, within `avail` bits.
  void gen_seeds(unsigned avail, bool exact, unsigned used, Emit emit) {
    const unsigned top = std::min<unsigned>((avail - 1) / 2, 31);
    for (unsigned z = top + 1; z-- > 0;) {
      const std::uint64_t lo = std::uint64_t{1} << z;
      const std::uint64_t hi = (lo << 1) - 1;
      for (std::uint64_t n = lo; n <= hi; ++n) {
        const unsigned s = static_cast<unsigned>(n - 1);
        const unsigned len = 2 * z + 1 + s;
        if (len > avail || s > limits_.max_seed_len) break;
        if (exact && len != avail) continue;
        Token& t = trail_.back();
        t.seed_len = s;
        const std::uint64_t count = std::uint64_t{1} << s;
        for (std::uint64_t seed = 0; seed < count; ++seed) {
          t.seed = seed;
          emit(sem_.hash(t.value, t.k, t.b, s, seed), used + len);
          if (stopped_) return;
        }
      }
    }
  }

  Sem& sem_;
  GeneratorLimits limits_;
  std::vector<Token> trail_;
  bool stopped_ = false;
};

/// Semantics that computes nothing; used to list programs.
struct NullSemantics {
  struct Value {};
  Value zero() { return {}; }
  Value one() { return {}; }
  Value bit(std::uint64_t) { return {}; }
  Value negate(const Value&) { return {}; }
  Value exclusive_or(const Value&, const Value&) { return {}; }
  Value if_then_else(const Value&, const Value&, const Value&) { return {}; }
  Value hash(std::uint64_t, std::uint64_t, std::uint64_t, unsigned, std::uint64_t) { return {}; }
};

}  // namespace mdl::detail
