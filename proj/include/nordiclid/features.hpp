#pragma once

// Character n-gram and word featurization over cleaned sentences.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nordiclid/charset.hpp"
#include "nordiclid/corpus.hpp"
#include "nordiclid/error.hpp"
#include "nordiclid/label.hpp"
#include "nordiclid/utf8.hpp"

namespace nordiclid {

// Sparse vector: entries sorted by index, no explicit zeros.
struct FeatureVector {
  std::size_t dim = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;

  double sum() const {
    double s = 0.0;
    for (const auto& [i, v] : entries) s += v;
    return s;
  }

  std::vector<double> dense() const {
    std::vector<double> out(dim, 0.0);
    for (const auto& [i, v] : entries) out[i] = v;
    return out;
  }

  static FeatureVector from_dense(std::span<const double> values) {
    FeatureVector fv{values.size(), {}};
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] != 0.0) fv.entries.emplace_back(static_cast<std::uint32_t>(i), values[i]);
    }
    return fv;
  }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Labeled training or test point.
struct Example {
  FeatureVector x;
  Label y = Label::kDk;
};

inline double dot(const FeatureVector& x, std::span<const double> w) {
  double s = 0.0;
  for (const auto& [i, v] : x.entries) s += v * w[i];
  return s;
}

// Squared Euclidean distance, summed in ascending index order.
inline double squared_distance(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    double d;
    if (ib == b.entries.end() || (ia != a.entries.end() && ia->first < ib->first)) {
      d = ia->second;
      ++ia;
    } else if (ia == a.entries.end() || ib->first < ia->first) {
      d = -ib->second;
      ++ib;
    } else {
      d = ia->second - ib->second;
      ++ia;
      ++ib;
    }
    s += d * d;
  }
  return s;
}

// Splits cleaned text into one string per character.
inline std::vector<std::string> split_chars(std::string_view text) {
  std::vector<std::string> out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    if (!utf8::decode_one(text, pos)) ++pos;
    out.emplace_back(text.substr(start, pos - start));
  }
  return out;
}

// Sliding window of width n and stride 1 over all characters, spaces included.
inline std::vector<std::string> extract_char_ngrams(std::string_view text, std::size_t n) {
  if (n == 0) throw InvalidArgument("n-gram order must be at least 1");
  std::vector<std::size_t> starts;
  std::size_t pos = 0;
  while (pos < text.size()) {
    starts.push_back(pos);
    if (!utf8::decode_one(text, pos)) ++pos;
  }
  starts.push_back(text.size());
  const std::size_t len = starts.size() - 1;
  std::vector<std::string> grams;
  if (len < n) return grams;
  grams.reserve(len - n + 1);
  for (std::size_t i = 0; i + n <= len; ++i) {
    grams.emplace_back(text.substr(starts[i], starts[i + n] - starts[i]));
  }
  return grams;
}

// Split on spaces, empty tokens dropped.
inline std::vector<std::string> word_tokenize(std::string_view text) {
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t sp = text.find(' ', pos);
    if (sp == std::string_view::npos) sp = text.size();
    if (sp > pos) words.emplace_back(text.substr(pos, sp - pos));
    pos = sp + 1;
  }
  return words;
}

namespace detail {

// Orders tokens by descending count, ties broken lexicographically (bytewise).
inline std::vector<std::string> rank_by_frequency(
    const std::unordered_map<std::string, std::size_t>& counts, std::optional<std::size_t> cap) {
  std::vector<std::pair<std::string, std::size_t>> items(counts.begin(), counts.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (cap && items.size() > *cap) items.resize(*cap);
  std::vector<std::string> out;
  out.reserve(items.size());
  for (auto& [token, count] : items) out.push_back(std::move(token));
  return out;
}

}  // namespace detail

// Token -> dense index map, frequency ranked. Shared by n-gram and word
// vocabularies.
class TokenIndex {
 public:
  TokenIndex() = default;
  explicit TokenIndex(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      index_.emplace(tokens_[i], static_cast<std::uint32_t>(i));
    }
  }

  std::optional<std::uint32_t> find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t i) const { return tokens_[i]; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  friend bool operator==(const TokenIndex& a, const TokenIndex& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

class NgramVocabulary {
 public:
  NgramVocabulary() = default;
  NgramVocabulary(std::size_t order, std::vector<std::string> grams)
      : order_(order), index_(std::move(grams)) {}

  // Every n-gram occurring in the corpus, most frequent first. cap keeps only
  // the top-K entries.
  static NgramVocabulary build(std::span<const Sentence> corpus, std::size_t n,
                               std::optional<std::size_t> cap = std::nullopt) {
    if (corpus.empty()) throw InvalidArgument("cannot build a vocabulary from an empty corpus");
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& s : corpus) {
      for (auto& g : extract_char_ngrams(s.text, n)) ++counts[std::move(g)];
    }
    return NgramVocabulary(n, detail::rank_by_frequency(counts, cap));
  }

  static NgramVocabulary build(const Dataset& d, std::size_t n,
                               std::optional<std::size_t> cap = std::nullopt) {
    return build(std::span(d.sentences()), n, cap);
  }

  std::size_t order() const { return order_; }
  std::size_t size() const { return index_.size(); }
  std::optional<std::uint32_t> find(std::string_view gram) const { return index_.find(gram); }
  const std::string& gram(std::size_t i) const { return index_.token(i); }
  const TokenIndex& index() const { return index_; }

  friend bool operator==(const NgramVocabulary&, const NgramVocabulary&) = default;

 private:
  std::size_t order_ = 1;
  TokenIndex index_;
};

// Words ranked by frequency; rank 1 is the most frequent word.
class WordVocabulary {
 public:
  WordVocabulary() = default;
  explicit WordVocabulary(std::vector<std::string> words) : index_(std::move(words)) {}

  static WordVocabulary build(std::span<const Sentence> corpus,
                              std::optional<std::size_t> cap = std::nullopt) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& s : corpus) {
      for (auto& w : word_tokenize(s.text)) ++counts[std::move(w)];
    }
    return WordVocabulary(detail::rank_by_frequency(counts, cap));
  }

  static WordVocabulary build(const Dataset& d, std::optional<std::size_t> cap = std::nullopt) {
    return build(std::span(d.sentences()), cap);
  }

  std::optional<std::size_t> rank(std::string_view word) const {
    if (auto i = index_.find(word)) return *i + 1;
    return std::nullopt;
  }

  std::size_t size() const { return index_.size(); }
  const std::string& word_at_rank(std::size_t rank) const { return index_.token(rank - 1); }
  const TokenIndex& index() const { return index_; }

  friend bool operator==(const WordVocabulary&, const WordVocabulary&) = default;

 private:
  TokenIndex index_;
};

enum class Normalize : bool { kNo = false, kYes = true };

namespace detail {

inline FeatureVector count_tokens(const std::vector<std::string>& tokens, const TokenIndex& index,
                                  Normalize normalize) {
  std::map<std::uint32_t, double> counts;
  double total = 0.0;
  for (const auto& t : tokens) {
    if (auto i = index.find(t)) {
      counts[*i] += 1.0;
      total += 1.0;
    }
  }
  FeatureVector fv{index.size(), {}};
  fv.entries.reserve(counts.size());
  for (const auto& [i, c] : counts) {
    fv.entries.emplace_back(i, normalize == Normalize::kYes ? c / total : c);
  }
  return fv;
}

}  // namespace detail

// Bag of character n-grams. Out-of-vocabulary n-grams are ignored.
inline FeatureVector vectorize(std::string_view text, const NgramVocabulary& vocab,
                               Normalize normalize = Normalize::kNo) {
  return detail::count_tokens(extract_char_ngrams(text, vocab.order()), vocab.index(), normalize);
}

// Bag of words; index = rank - 1.
inline FeatureVector vectorize_words(std::string_view text, const WordVocabulary& vocab,
                                     Normalize normalize = Normalize::kNo) {
  return detail::count_tokens(word_tokenize(text), vocab.index(), normalize);
}

struct CharProfile {
  PerLabel<std::array<double, kAlphabetSize>> counts{};
  // Each character's count divided by that character's total across labels.
  PerLabel<std::array<double, kAlphabetSize>> normalized{};
};

inline CharProfile char_frequency_profile(const SentencePool& pool) {
  CharProfile p;
  for (Label l : kAllLabels) {
    auto& row = p.counts[index_of(l)];
    for (const auto& s : pool[index_of(l)]) {
      for (char32_t c : utf8::decode(s.text)) {
        if (auto i = kCharset.index(c)) row[*i] += 1.0;
      }
    }
  }
  for (std::size_t c = 0; c < kAlphabetSize; ++c) {
    double total = 0.0;
    for (std::size_t l = 0; l < kNumLabels; ++l) total += p.counts[l][c];
    if (total <= 0.0) continue;
    for (std::size_t l = 0; l < kNumLabels; ++l) p.normalized[l][c] = p.counts[l][c] / total;
  }
  return p;
}

// `<token>\t<index>` per line, index ascending.
inline std::string format_vocabulary(const TokenIndex& index, std::size_t first_index = 0) {
  std::string out;
  for (std::size_t i = 0; i < index.size(); ++i) {
    out += index.token(i);
    out += '\t';
    out += std::to_string(i + first_index);
    out += '\n';
  }
  return out;
}

inline std::vector<std::string> parse_vocabulary(std::string_view content,
                                                 std::size_t first_index = 0) {
  std::vector<std::string> tokens;
  detail::for_each_tsv_row(content, [&](std::size_t line, std::string_view token,
                                        std::string_view idx) {
    if (idx != std::to_string(tokens.size() + first_index)) {
      throw ParseError("vocabulary index out of sequence at line " + std::to_string(line));
    }
    tokens.emplace_back(token);
  });
  return tokens;
}

}  // namespace nordiclid
