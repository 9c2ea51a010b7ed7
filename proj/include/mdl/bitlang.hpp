#pragma once

// A small prefix-free expression language over bit-sequence inputs.
//
// Grammar (operator prefix code, then operands):
//   00 Zero | 01 One | 100 Bit gamma(i) | 101 Not e | 110 Xor e e
//   1110 If e e e | 1111 Hash gamma(m) gamma(k+1) gamma(b) gamma(|seed|+1) seed
// where gamma is the Elias-gamma code. Every valid code decodes to exactly one
// expression consuming every bit, and no valid code is a proper prefix of another.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mdl/bitstring.hpp"

namespace mdl {

/// Number of observable instance bits.
inline constexpr unsigned kMaxPrefix = 64;

/// An instance x in {0,1}^N truncated to its first kMaxPrefix bits.
/// Bits are addressed 1-based: bit(1) is the first bit of the sequence.
class Instance {
 public:
  constexpr Instance() = default;
  /// Bit i (1-based) of x is bit (64 - i) of `word`.
  static constexpr Instance from_word(std::uint64_t word) noexcept {
    Instance x;
    x.word_ = word;
    return x;
  }
  /// Copies `bits` into the leading positions, padding with zeros.
  static Instance from_bits(const BitString& bits);

  constexpr std::uint64_t word() const noexcept { return word_; }
  /// 1-based access; i must be in [1, kMaxPrefix] or CapacityError is thrown.
  bool bit(unsigned i) const;
  void set_bit(unsigned i, bool value);
  /// x[:b] right-aligned in a word; b in [0, kMaxPrefix].
  std::uint64_t prefix_word(unsigned b) const;
  BitString prefix(unsigned b) const;

  friend constexpr auto operator<=>(const Instance&, const Instance&) = default;

 private:
  std::uint64_t word_ = 0;
};

/// Length of the longest common prefix of two instances (kMaxPrefix when equal).
unsigned common_prefix_length(const Instance& a, const Instance& b);

enum class Op : std::uint8_t { kZero, kOne, kBit, kNot, kXor, kIf, kHash };

/// Parameters of a Hash leaf: predicts Ber(k/m) from x[:b] keyed by `seed`.
struct HashLeaf {
  std::uint64_t m = 1;
  std::uint64_t k = 0;
  std::uint64_t b = 1;
  BitString seed;

  friend bool operator==(const HashLeaf&, const HashLeaf&) = default;
};

/// Decoded program tree (value type).
class Expr {
 public:
  static Expr zero();
  static Expr one();
  static Expr bit(std::uint64_t index);
  static Expr negation(Expr e);
  static Expr exclusive_or(Expr lhs, Expr rhs);
  static Expr if_then_else(Expr cond, Expr then_branch, Expr else_branch);
  static Expr hash(std::uint64_t m, std::uint64_t k, std::uint64_t b, BitString seed);

  Op op() const noexcept { return op_; }
  /// Bit index; meaningful for Op::kBit only.
  std::uint64_t index() const noexcept { return index_; }
  /// Meaningful for Op::kHash only.
  const HashLeaf& hash_leaf() const noexcept { return hash_; }
  const std::vector<Expr>& children() const noexcept { return children_; }

  std::string to_string() const;

  friend bool operator==(const Expr&, const Expr&) = default;

 private:
  Expr() = default;

  Op op_ = Op::kZero;
  std::uint64_t index_ = 0;
  HashLeaf hash_;
  std::vector<Expr> children_;
};

/// An encoded program; its size is the description length |h|.
struct ProgramCode {
  BitString bits;
  std::size_t length() const noexcept { return bits.size(); }

  /// "<bits>:<hex>": decimal bit count, colon, lowercase hex of the bits MSB-first,
  /// zero-padded to a whole number of nibbles. E.g. Bit(1) -> "4:9".
  std::string serialize() const;
  static ProgramCode parse(std::string_view text);

  friend bool operator==(const ProgramCode&, const ProgramCode&) = default;
};

/// Elias-gamma code: floor(log2 n) zeros then n in binary. n == 0 throws DomainError.
BitString gamma_encode(std::uint64_t n);
/// 2 floor(log2 n) + 1.
unsigned gamma_length(std::uint64_t n);

enum class DecodeStatus { kOk, kTruncated, kTrailingBits, kKExceedsM, kOverflow };
const char* to_string(DecodeStatus status);

struct DecodeResult {
  DecodeStatus status = DecodeStatus::kOk;
  std::optional<Expr> expr;
};

/// Parses a complete program; never throws.
DecodeResult try_decode(const BitString& bits);
/// As try_decode, throwing DecodeError on failure.
Expr decode(const BitString& bits);
ProgramCode encode(const Expr& e);
/// |encode(e)| without materialising the code.
std::size_t code_length(const Expr& e);

/// Evaluates e on x. Bit indices or hash prefixes beyond kMaxPrefix throw CapacityError.
bool eval(const Expr& e, const Instance& x);

/// Indices of all instance bits e can read: Bit indices and 1..b for every Hash leaf.
std::set<std::uint64_t> dependency_bits(const Expr& e);
/// Largest index e can read (0 for constant programs).
std::uint64_t max_dependency(const Expr& e);

/// Every expression whose code has exactly `length` bits, in lexicographic order of
/// the codes. Generated structurally, not by decoding all 2^length strings.
std::vector<Expr> enumerate(unsigned length);
/// Streaming form of enumerate(); `visit` receives each expression in order.
void for_each_program(unsigned length, const std::function<void(const Expr&)>& visit);

}  // namespace mdl
