#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace nordiclid {

// The accepted alphabet: 39 letters followed by the space character. Index
// order is the order of this string.
inline constexpr std::u32string_view kAlphabet =
    U"abcdefghijklmnopqrstuvwxyzáäåæéíðó"
    U"öøúýþ ";

inline constexpr std::size_t kAlphabetSize = 40;
static_assert(kAlphabet.size() == kAlphabetSize);

class CharsetIndex {
 public:
  static constexpr int kAbsent = -1;

  constexpr CharsetIndex() : table_{} {
    for (auto& v : table_) v = kAbsent;
    for (std::size_t i = 0; i < kAlphabet.size(); ++i) {
      table_[static_cast<std::size_t>(kAlphabet[i])] = static_cast<int>(i);
    }
  }

  constexpr std::optional<std::size_t> index(char32_t c) const {
    if (c >= table_.size() || table_[c] == kAbsent) return std::nullopt;
    return static_cast<std::size_t>(table_[c]);
  }

  constexpr bool contains(char32_t c) const { return index(c).has_value(); }

  static constexpr char32_t at(std::size_t i) { return kAlphabet[i]; }
  static constexpr std::size_t size() { return kAlphabetSize; }

 private:
  // Every accepted character is below U+0100.
  std::array<int, 0x100> table_;
};

inline constexpr CharsetIndex kCharset{};

}  // namespace nordiclid
