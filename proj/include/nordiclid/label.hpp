#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace nordiclid {

// The six language classes. The enumerator order is the canonical order used
// for matrix axes, output columns and every argmax tie-break.
enum class Label : std::size_t { kDk = 0, kSv, kNn, kNb, kFo, kIs };

inline constexpr std::size_t kNumLabels = 6;

inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::kDk, Label::kSv, Label::kNn, Label::kNb, Label::kFo, Label::kIs};

inline constexpr std::array<std::string_view, kNumLabels> kLabelCodes = {
    "dk", "sv", "nn", "nb", "fo", "is"};

// ISO 639-1 equivalents, for reports only.
inline constexpr std::array<std::string_view, kNumLabels> kIsoCodes = {
    "da", "sv", "nn", "nb", "fo", "is"};

template <class T>
using PerLabel = std::array<T, kNumLabels>;

constexpr std::size_t index_of(Label l) noexcept { return static_cast<std::size_t>(l); }

constexpr Label label_at(std::size_t i) noexcept { return static_cast<Label>(i); }

constexpr std::string_view code_of(Label l) noexcept { return kLabelCodes[index_of(l)]; }

constexpr std::string_view iso_code_of(Label l) noexcept { return kIsoCodes[index_of(l)]; }

inline std::optional<Label> parse_label(std::string_view code) noexcept {
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    if (kLabelCodes[i] == code) return label_at(i);
  }
  return std::nullopt;
}

}  // namespace nordiclid
