#include "mdl/bitlang.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "mdl/errors.hpp"
#include "mdl/hash_family.hpp"
#include "mdl/program_generator.hpp"

namespace mdl {

// ---------------------------------------------------------------------------
// Instance

Instance Instance::from_bits(const BitString& bits) {
  if (bits.size() > kMaxPrefix) throw CapacityError("instance longer than capacity");
  Instance x;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) x.word_ |= std::uint64_t{1} << (63 - i);
  }
  return x;
}

bool Instance::bit(unsigned i) const {
  if (i == 0 || i > kMaxPrefix) throw CapacityError("bit index outside [1, 64]");
  return ((word_ >> (64 - i)) & 1U) != 0;
}

void Instance::set_bit(unsigned i, bool value) {
  if (i == 0 || i > kMaxPrefix) throw CapacityError("bit index outside [1, 64]");
  const std::uint64_t mask = std::uint64_t{1} << (64 - i);
  word_ = value ? (word_ | mask) : (word_ & ~mask);
}

std::uint64_t Instance::prefix_word(unsigned b) const {
  if (b > kMaxPrefix) throw CapacityError("prefix longer than capacity");
  if (b == 0) return 0;
  return word_ >> (64 - b);
}

BitString Instance::prefix(unsigned b) const { return BitString::from_uint(prefix_word(b), b); }

unsigned common_prefix_length(const Instance& a, const Instance& b) {
  return static_cast<unsigned>(std::countl_zero(a.word() ^ b.word()));
}

// ---------------------------------------------------------------------------
// Expr

Expr Expr::zero() {
  Expr e;
  e.op_ = Op::kZero;
  return e;
}

Expr Expr::one() {
  Expr e;
  e.op_ = Op::kOne;
  return e;
}

Expr Expr::bit(std::uint64_t index) {
  if (index == 0) throw DomainError("Bit index is 1-based");
  Expr e;
  e.op_ = Op::kBit;
  e.index_ = index;
  return e;
}

Expr Expr::negation(Expr inner) {
  Expr e;
  e.op_ = Op::kNot;
  e.children_.push_back(std::move(inner));
  return e;
}

Expr Expr::exclusive_or(Expr lhs, Expr rhs) {
  Expr e;
  e.op_ = Op::kXor;
  e.children_.reserve(2);
  e.children_.push_back(std::move(lhs));
  e.children_.push_back(std::move(rhs));
  return e;
}

Expr Expr::if_then_else(Expr cond, Expr then_branch, Expr else_branch) {
  Expr e;
  e.op_ = Op::kIf;
  e.children_.reserve(3);
  e.children_.push_back(std::move(cond));
  e.children_.push_back(std::move(then_branch));
  e.children_.push_back(std::move(else_branch));
  return e;
}

Expr Expr::hash(std::uint64_t m, std::uint64_t k, std::uint64_t b, BitString seed) {
  if (m == 0) throw DomainError("Hash requires m >= 1");
  if (k > m) throw DomainError("Hash requires k <= m");
  if (b == 0) throw DomainError("Hash requires b >= 1");
  Expr e;
  e.op_ = Op::kHash;
  e.hash_ = HashLeaf{m, k, b, std::move(seed)};
  return e;
}

std::string Expr::to_string() const {
  switch (op_) {
    case Op::kZero: return "Zero";
    case Op::kOne: return "One";
    case Op::kBit: return "Bit(" + std::to_string(index_) + ")";
    case Op::kNot: return "Not(" + children_[0].to_string() + ")";
    case Op::kXor:
      return "Xor(" + children_[0].to_string() + ", " + children_[1].to_string() + ")";
    case Op::kIf:
      return "If(" + children_[0].to_string() + ", " + children_[1].to_string() + ", " +
             children_[2].to_string() + ")";
    case Op::kHash:
      return "Hash(m=" + std::to_string(hash_.m) + ", k=" + std::to_string(hash_.k) +
             ", b=" + std::to_string(hash_.b) + ", seed=\"" + hash_.seed.to_string() + "\")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Codec

unsigned gamma_length(std::uint64_t n) {
  if (n == 0) throw DomainError("gamma code is defined for n >= 1");
  return 2 * static_cast<unsigned>(std::bit_width(n)) - 1;
}

BitString gamma_encode(std::uint64_t n) {
  if (n == 0) throw DomainError("gamma code is defined for n >= 1");
  const unsigned width = static_cast<unsigned>(std::bit_width(n));
  BitString out;
  out.append_uint(0, width - 1);
  out.append_uint(n, width);
  return out;
}

namespace {

void encode_into(const Expr& e, BitString& out) {
  switch (e.op()) {
    case Op::kZero: out.append_uint(0b00, 2); return;
    case Op::kOne: out.append_uint(0b01, 2); return;
    case Op::kBit:
      out.append_uint(0b100, 3);
      out.append(gamma_encode(e.index()));
      return;
    case Op::kNot: out.append_uint(0b101, 3); break;
    case Op::kXor: out.append_uint(0b110, 3); break;
    case Op::kIf: out.append_uint(0b1110, 4); break;
    case Op::kHash: {
      const HashLeaf& h = e.hash_leaf();
      out.append_uint(0b1111, 4);
      out.append(gamma_encode(h.m));
      out.append(gamma_encode(h.k + 1));
      out.append(gamma_encode(h.b));
      out.append(gamma_encode(h.seed.size() + 1));
      out.append(h.seed);
      return;
    }
  }
  for (const Expr& child : e.children()) encode_into(child, out);
}

class Decoder {
 public:
  explicit Decoder(const BitString& bits) : bits_(bits) {}

  DecodeResult run() {
    DecodeResult result;
    std::optional<Expr> e = parse();
    if (!e) {
      result.status = status_;
      return result;
    }
    if (pos_ != bits_.size()) {
      result.status = DecodeStatus::kTrailingBits;
      return result;
    }
    result.expr = std::move(e);
    return result;
  }

 private:
  bool take(bool& bit) {
    if (pos_ >= bits_.size()) return fail(DecodeStatus::kTruncated);
    bit = bits_[pos_++];
    return true;
  }

  bool fail(DecodeStatus s) {
    status_ = s;
    return false;
  }

  bool gamma(std::uint64_t& n) {
    unsigned zeros = 0;
    bool bit = false;
    for (;;) {
      if (!take(bit)) return false;
      if (bit) break;
      if (++zeros > 63) return fail(DecodeStatus::kOverflow);
    }
    n = 1;
    for (unsigned i = 0; i < zeros; ++i) {
      if (!take(bit)) return false;
      n = (n << 1) | (bit ? 1U : 0U);
    }
    return true;
  }

  std::optional<Expr> parse() {
    bool b0 = false;
    bool b1 = false;
    if (!take(b0) || !take(b1)) return std::nullopt;
    if (!b0) return b1 ? Expr::one() : Expr::zero();
    bool b2 = false;
    if (!take(b2)) return std::nullopt;
    if (!b1 && !b2) {
      std::uint64_t i = 0;
      if (!gamma(i)) return std::nullopt;
      return Expr::bit(i);
    }
    if (!b1 && b2) {
      auto inner = parse();
      if (!inner) return std::nullopt;
      return Expr::negation(std::move(*inner));
    }
    if (b1 && !b2) {
      auto lhs = parse();
      if (!lhs) return std::nullopt;
      auto rhs = parse();
      if (!rhs) return std::nullopt;
      return Expr::exclusive_or(std::move(*lhs), std::move(*rhs));
    }
    bool b3 = false;
    if (!take(b3)) return std::nullopt;
    if (!b3) {
      auto c = parse();
      if (!c) return std::nullopt;
      auto t = parse();
      if (!t) return std::nullopt;
      auto f = parse();
      if (!f) return std::nullopt;
      return Expr::if_then_else(std::move(*c), std::move(*t), std::move(*f));
    }
    std::uint64_t m = 0;
    std::uint64_t k1 = 0;
    std::uint64_t b = 0;
    std::uint64_t s1 = 0;
    if (!gamma(m) || !gamma(k1)) return std::nullopt;
    if (k1 > m + 1) {
      fail(DecodeStatus::kKExceedsM);
      return std::nullopt;
    }
    if (!gamma(b) || !gamma(s1)) return std::nullopt;
    BitString seed;
    for (std::uint64_t i = 0; i + 1 < s1; ++i) {
      bool bit = false;
      if (!take(bit)) return std::nullopt;
      seed.push_back(bit);
    }
    return Expr::hash(m, k1 - 1, b, std::move(seed));
  }

  const BitString& bits_;
  std::size_t pos_ = 0;
  DecodeStatus status_ = DecodeStatus::kOk;
};

}  // namespace

const char* to_string(DecodeStatus status) {
  switch (status) {
    case DecodeStatus::kOk: return "ok";
    case DecodeStatus::kTruncated: return "truncated input";
    case DecodeStatus::kTrailingBits: return "trailing bits";
    case DecodeStatus::kKExceedsM: return "hash k exceeds m";
    case DecodeStatus::kOverflow: return "gamma field overflow";
  }
  return "unknown";
}

DecodeResult try_decode(const BitString& bits) { return Decoder(bits).run(); }

Expr decode(const BitString& bits) {
  DecodeResult r = try_decode(bits);
  if (!r.expr) throw DecodeError(std::string("cannot decode program: ") + to_string(r.status));
  return std::move(*r.expr);
}

ProgramCode encode(const Expr& e) {
  ProgramCode code;
  encode_into(e, code.bits);
  return code;
}

std::size_t code_length(const Expr& e) {
  switch (e.op()) {
    case Op::kZero:
    case Op::kOne: return 2;
    case Op::kBit: return 3 + gamma_length(e.index());
    case Op::kHash: {
      const HashLeaf& h = e.hash_leaf();
      return 4 + gamma_length(h.m) + gamma_length(h.k + 1) + gamma_length(h.b) +
             gamma_length(h.seed.size() + 1) + h.seed.size();
    }
    default: break;
  }
  std::size_t len = e.op() == Op::kIf ? 4 : 3;
  for (const Expr& child : e.children()) len += code_length(child);
  return len;
}

std::string ProgramCode::serialize() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = std::to_string(bits.size()) + ":";
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    unsigned nibble = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      nibble <<= 1;
      if (i + j < bits.size() && bits[i + j]) nibble |= 1;
    }
    out.push_back(kHex[nibble]);
  }
  return out;
}

ProgramCode ProgramCode::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw DecodeError("program serialization must look like <bits>:<hex>");
  }
  std::size_t length = 0;
  for (char c : text.substr(0, colon)) {
    if (c < '0' || c > '9') throw DecodeError("bad bit count in program serialization");
    length = length * 10 + static_cast<std::size_t>(c - '0');
  }
  const std::string_view hex = text.substr(colon + 1);
  if (hex.size() != (length + 3) / 4) throw DecodeError("hex digits do not match bit count");
  ProgramCode code;
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const char c = hex[i];
    unsigned nibble = 0;
    if (c >= '0' && c <= '9') {
      nibble = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      nibble = static_cast<unsigned>(c - 'a' + 10);
    } else {
      throw DecodeError("program hex must be lowercase");
    }
    for (unsigned j = 0; j < 4; ++j) {
      const bool bit = ((nibble >> (3 - j)) & 1U) != 0;
      if (4 * i + j < length) {
        code.bits.push_back(bit);
      } else if (bit) {
        throw DecodeError("nonzero padding in program serialization");
      }
    }
  }
  return code;
}

// ---------------------------------------------------------------------------
// Interpreter

bool eval(const Expr& e, const Instance& x) {
  switch (e.op()) {
    case Op::kZero: return false;
    case Op::kOne: return true;
    case Op::kBit:
      if (e.index() > kMaxPrefix) throw CapacityError("Bit index beyond observable prefix");
      return x.bit(static_cast<unsigned>(e.index()));
    case Op::kNot: return !eval(e.children()[0], x);
    case Op::kXor: return eval(e.children()[0], x) != eval(e.children()[1], x);
    case Op::kIf:
      return eval(e.children()[0], x) ? eval(e.children()[1], x) : eval(e.children()[2], x);
    case Op::kHash: {
      const HashLeaf& h = e.hash_leaf();
      if (h.b > kMaxPrefix) throw CapacityError("Hash prefix beyond observable prefix");
      const unsigned b = static_cast<unsigned>(h.b);
      if (h.seed.size() <= 64) {
        return hash_predict_packed(h.seed.to_uint(), static_cast<unsigned>(h.seed.size()), h.k,
                                   h.m, x.prefix_word(b), b);
      }
      return hash_predict(h.seed, h.k, h.m, x.prefix(b));
    }
  }
  return false;
}

namespace {

void collect_dependencies(const Expr& e, std::set<std::uint64_t>& out) {
  if (e.op() == Op::kBit) {
    out.insert(e.index());
  } else if (e.op() == Op::kHash) {
    for (std::uint64_t i = 1; i <= e.hash_leaf().b; ++i) out.insert(i);
  }
  for (const Expr& child : e.children()) collect_dependencies(child, out);
}

}  // namespace

std::set<std::uint64_t> dependency_bits(const Expr& e) {
  std::set<std::uint64_t> out;
  collect_dependencies(e, out);
  return out;
}

std::uint64_t max_dependency(const Expr& e) {
  std::uint64_t best = 0;
  if (e.op() == Op::kBit) best = e.index();
  if (e.op() == Op::kHash) best = e.hash_leaf().b;
  for (const Expr& child : e.children()) best = std::max(best, max_dependency(child));
  return best;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace detail {

namespace {

Expr parse_tokens(std::span<const Token> tokens, std::size_t& pos) {
  if (pos >= tokens.size()) throw DecodeError("incomplete token sequence");
  const Token& t = tokens[pos++];
  switch (t.op) {
    case Op::kZero: return Expr::zero();
    case Op::kOne: return Expr::one();
    case Op::kBit: return Expr::bit(t.value);
    case Op::kNot: return Expr::negation(parse_tokens(tokens, pos));
    case Op::kXor: {
      Expr lhs = parse_tokens(tokens, pos);
      Expr rhs = parse_tokens(tokens, pos);
      return Expr::exclusive_or(std::move(lhs), std::move(rhs));
    }
    case Op::kIf: {
      Expr c = parse_tokens(tokens, pos);
      Expr a = parse_tokens(tokens, pos);
      Expr b = parse_tokens(tokens, pos);
      return Expr::if_then_else(std::move(c), std::move(a), std::move(b));
    }
    case Op::kHash: return Expr::hash(t.value, t.k, t.b, BitString::from_uint(t.seed, t.seed_len));
  }
  throw DecodeError("unknown token");
}

}  // namespace

Expr expr_from_tokens(std::span<const Token> tokens) {
  std::size_t pos = 0;
  Expr e = parse_tokens(tokens, pos);
  if (pos != tokens.size()) throw DecodeError("surplus tokens after program");
  return e;
}

}  // namespace detail

void for_each_program(unsigned length, const std::function<void(const Expr&)>& visit) {
  if (length > 120) throw DomainError("enumeration length too large");
  detail::NullSemantics sem;
  detail::ProgramGenerator<detail::NullSemantics> gen(sem);
  gen.generate(length, [&](const detail::NullSemantics::Value&, unsigned) {
    visit(gen.current_expr());
  });
}

std::vector<Expr> enumerate(unsigned length) {
  std::vector<Expr> out;
  for_each_program(length, [&](const Expr& e) { out.push_back(e); });
  return out;
}

}  // namespace mdl
