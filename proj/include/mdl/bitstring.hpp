#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mdl {

/// Finite bit string, indexed from 0, written most-significant (first) bit first.
class BitString {
 public:
  BitString() = default;

  /// Parses a string of '0'/'1' characters; anything else throws DomainError.
  static BitString from_string(std::string_view text);
  /// The low `width` bits of `value`, most significant first.
  static BitString from_uint(std::uint64_t value, unsigned width);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i]; }

  void push_back(bool bit) { bits_.push_back(bit); }
  void append(const BitString& other);
  /// Appends the low `width` bits of `value`, most significant first.
  void append_uint(std::uint64_t value, unsigned width);

  BitString prefix(std::size_t n) const;
  /// Interprets the whole string as an unsigned integer; size() must be <= 64.
  std::uint64_t to_uint() const;
  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;
  /// Lexicographic order on bits; a proper prefix sorts first.
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b);

 private:
  std::vector<bool> bits_;
};

/// Packs bits MSB-first into 64-bit words, zero-padding the last word.
std::vector<std::uint64_t> pack_words(const BitString& bits);

}  // namespace mdl
