#include "mdl/bitstring.hpp"

#include <algorithm>

#include "mdl/errors.hpp"

namespace mdl {

BitString BitString::from_string(std::string_view text) {
  BitString out;
  out.bits_.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw DomainError("bit string may contain only '0' and '1'");
    }
    out.bits_.push_back(c == '1');
  }
  return out;
}

BitString BitString::from_uint(std::uint64_t value, unsigned width) {
  BitString out;
  out.append_uint(value, width);
  return out;
}

void BitString::append(const BitString& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

void BitString::append_uint(std::uint64_t value, unsigned width) {
  if (width > 64) throw DomainError("append_uint width exceeds 64");
  for (unsigned i = width; i-- > 0;) bits_.push_back(((value >> i) & 1U) != 0);
}

BitString BitString::prefix(std::size_t n) const {
  BitString out;
  const std::size_t len = std::min(n, bits_.size());
  out.bits_.assign(bits_.begin(), bits_.begin() + static_cast<std::ptrdiff_t>(len));
  return out;
}

std::uint64_t BitString::to_uint() const {
  if (bits_.size() > 64) throw DomainError("bit string longer than 64 bits");
  std::uint64_t v = 0;
  for (bool b : bits_) v = (v << 1) | (b ? 1U : 0U);
  return v;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (bool b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return a[i] ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return a.size() <=> b.size();
}

std::vector<std::uint64_t> pack_words(const BitString& bits) {
  std::vector<std::uint64_t> words((bits.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) words[i / 64] |= std::uint64_t{1} << (63 - i % 64);
  }
  return words;
}

}  // namespace mdl
