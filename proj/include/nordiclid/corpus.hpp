#pragma once

// Sentence extraction, charset cleaning and stratified dataset construction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nordiclid/charset.hpp"
#include "nordiclid/error.hpp"
#include "nordiclid/label.hpp"
#include "nordiclid/rng.hpp"
#include "nordiclid/utf8.hpp"

namespace nordiclid {

// Cleaned sentences shorter than this carry no character bigram and are
// dropped during ingestion.
inline constexpr std::size_t kMinSentenceLength = 2;

struct Sentence {
  std::string text;  // cleaned, every character in the accepted alphabet
  Label label = Label::kDk;
  std::size_t length = 0;  // in characters, not bytes

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

using SentencePool = PerLabel<std::vector<Sentence>>;

// Abbreviations after which a period does not end a sentence. Entries are
// lowercase and include their trailing period.
class AbbreviationList {
 public:
  AbbreviationList() = default;
  explicit AbbreviationList(std::vector<std::string> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end());
  }

  static AbbreviationList defaults() {
    return AbbreviationList({"ca.", "kl.", "bl.a.", "f.eks.", "etc.", "nr.", "dr.", "mr.",
                             "t.d.", "o.s.frv.", "m.fl.", "m.m.", "osv.", "s.", "jf.",
                             "f.ex.", "t.ex.", "bl.", "fx.", "mv.", "o.l.", "pga."});
  }

  // One abbreviation per line; blank lines and lines starting with '#' are
  // ignored. The entries are added to the defaults.
  static AbbreviationList load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileError(path.string());
    auto list = defaults();
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      list.entries_.push_back(lowercase(line));
    }
    std::sort(list.entries_.begin(), list.entries_.end());
    list.entries_.erase(std::unique(list.entries_.begin(), list.entries_.end()),
                        list.entries_.end());
    return list;
  }

  bool contains(std::string_view token) const {
    return std::binary_search(entries_.begin(), entries_.end(), lowercase(token));
  }

  const std::vector<std::string>& entries() const { return entries_; }

 private:
  static std::string lowercase(std::string_view s) {
    std::u32string cps = utf8::decode(s);
    for (auto& c : cps) c = utf8::to_lower(c);
    return utf8::encode(cps);
  }

  std::vector<std::string> entries_;
};

namespace detail {

inline bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

inline bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
  return s;
}

inline void split_line(std::string_view line, const AbbreviationList& abbreviations,
                       std::vector<std::string>& out) {
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < line.size()) {
    if (!is_terminal(line[i])) {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < line.size() && is_terminal(line[end])) ++end;
    const bool followed_by_space = end < line.size() && is_blank(line[end]);
    if (!followed_by_space) {
      i = end;
      continue;
    }
    if (end - i == 1 && line[i] == '.') {
      std::size_t word_start = i;
      while (word_start > start && !is_blank(line[word_start - 1])) --word_start;
      if (abbreviations.contains(line.substr(word_start, end - word_start))) {
        i = end;
        continue;
      }
    }
    auto fragment = trim(line.substr(start, end - start));
    if (!fragment.empty()) out.emplace_back(fragment);
    start = end;
    i = end;
  }
  auto rest = trim(line.substr(start));
  if (!rest.empty()) out.emplace_back(rest);
}

}  // namespace detail

// Splits raw text into sentences: first on line breaks, then on '.', '!' or
// '?' followed by whitespace, except after a known abbreviation.
inline std::vector<std::string> extract_sentences(
    std::string_view raw, const AbbreviationList& abbreviations = AbbreviationList::defaults()) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    if (nl == std::string_view::npos) nl = raw.size();
    detail::split_line(raw.substr(pos, nl - pos), abbreviations, out);
    pos = nl + 1;
  }
  return out;
}

// Lowercases, maps every character outside the accepted alphabet to a space,
// collapses space runs and strips leading space. A trailing space produced by
// replacement is kept.
inline std::string clean_sentence(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool last_space = true;  // suppresses leading spaces
  std::size_t pos = 0;
  while (pos < s.size()) {
    char32_t cp = utf8::kReplacement;
    if (auto decoded = utf8::decode_one(s, pos)) {
      cp = *decoded;
    } else {
      ++pos;
    }
    cp = utf8::to_lower(cp);
    if (!kCharset.contains(cp)) cp = U' ';
    if (cp == U' ') {
      if (last_space) continue;
      last_space = true;
    } else {
      last_space = false;
    }
    utf8::append(out, cp);
  }
  return out;
}

// Cleans raw text into a sentence, or nothing if too short afterwards.
inline std::optional<Sentence> make_sentence(Label label, std::string_view raw) {
  std::string text = clean_sentence(raw);
  const std::size_t length = utf8::length(text);
  if (length < kMinSentenceLength) return std::nullopt;
  return Sentence{std::move(text), label, length};
}

class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<Sentence> sentences, std::uint64_t seed = 0)
      : sentences_(std::move(sentences)), seed_(seed) {}

  const std::vector<Sentence>& sentences() const { return sentences_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return sentences_.size(); }
  bool empty() const { return sentences_.empty(); }
  const Sentence& operator[](std::size_t i) const { return sentences_[i]; }
  auto begin() const { return sentences_.begin(); }
  auto end() const { return sentences_.end(); }

  PerLabel<std::size_t> per_class_count() const {
    PerLabel<std::size_t> counts{};
    for (const auto& s : sentences_) ++counts[index_of(s.label)];
    return counts;
  }

  bool stratified() const {
    const auto counts = per_class_count();
    return std::all_of(counts.begin(), counts.end(), [&](std::size_t c) { return c == counts[0]; });
  }

  // Groups sentences by label, preserving order.
  SentencePool by_label() const {
    SentencePool pool;
    for (const auto& s : sentences_) pool[index_of(s.label)].push_back(s);
    return pool;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<Sentence> sentences_;
  std::uint64_t seed_ = 0;
};

// Draws exactly n_per_class sentences per label without replacement. The
// result is shuffled; identical seeds give identical datasets.
inline Dataset stratified_sample(const SentencePool& pool, std::size_t n_per_class,
                                 std::uint64_t seed) {
  for (Label l : kAllLabels) {
    const auto available = pool[index_of(l)].size();
    if (available < n_per_class) {
      throw InsufficientData(std::string(code_of(l)), available, n_per_class);
    }
  }
  Rng rng(seed);
  std::vector<Sentence> chosen;
  chosen.reserve(n_per_class * kNumLabels);
  for (Label l : kAllLabels) {
    const auto& sentences = pool[index_of(l)];
    std::vector<std::size_t> order(sentences.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(std::span(order));
    for (std::size_t i = 0; i < n_per_class; ++i) chosen.push_back(sentences[order[i]]);
  }
  rng.shuffle(std::span(chosen));
  return Dataset(std::move(chosen), seed);
}

// Per-label split; train receives floor(ratio * n) sentences of each label.
// Both halves keep the input order.
inline std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double ratio,
                                                    std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidRatio(ratio);
  Rng rng(seed);
  std::vector<bool> in_train(d.size(), false);
  for (Label l : kAllLabels) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i].label == l) members.push_back(i);
    }
    rng.shuffle(std::span(members));
    const auto take = static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(members.size()) + 1e-9));
    for (std::size_t i = 0; i < take; ++i) in_train[members[i]] = true;
  }
  std::vector<Sentence> train, test;
  for (std::size_t i = 0; i < d.size(); ++i) (in_train[i] ? train : test).push_back(d[i]);
  return {Dataset(std::move(train), seed), Dataset(std::move(test), seed)};
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reads `<code>.txt` for every label, extracts and cleans its sentences.
inline SentencePool ingest_raw_dir(
    const std::filesystem::path& dir,
    const AbbreviationList& abbreviations = AbbreviationList::defaults()) {
  for (Label l : kAllLabels) {
    if (!std::filesystem::is_regular_file(dir / (std::string(code_of(l)) + ".txt"))) {
      throw MissingLabelFile(std::string(code_of(l)));
    }
  }
  SentencePool pool;
  for (Label l : kAllLabels) {
    const auto path = dir / (std::string(code_of(l)) + ".txt");
    const std::string raw = read_file(path);
    if (auto bad = utf8::find_invalid(raw)) throw InvalidUtf8(path.string(), *bad);
    for (const auto& fragment : extract_sentences(raw, abbreviations)) {
      if (auto s = make_sentence(l, fragment)) pool[index_of(l)].push_back(std::move(*s));
    }
  }
  return pool;
}

struct TatoebaImport {
  SentencePool pool;
  std::size_t skipped_unknown_label = 0;
  std::size_t dropped_too_short = 0;
};

namespace detail {

// Calls fn(line_number, label_field, text_field) for every non-empty line of a
// `<label>\t<text>` file.
template <class Fn>
void for_each_tsv_row(std::string_view content, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      throw MalformedRow(line_no);
    }
    fn(line_no, line.substr(0, tab), line.substr(tab + 1));
  }
}

}  // namespace detail

inline TatoebaImport parse_tatoeba(std::string_view content) {
  TatoebaImport out;
  detail::for_each_tsv_row(content, [&](std::size_t, std::string_view code, std::string_view text) {
    const auto label = parse_label(code);
    if (!label) {
      ++out.skipped_unknown_label;
      return;
    }
    if (auto s = make_sentence(*label, text)) {
      out.pool[index_of(*label)].push_back(std::move(*s));
    } else {
      ++out.dropped_too_short;
    }
  });
  return out;
}

inline TatoebaImport ingest_tatoeba(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  if (auto bad = utf8::find_invalid(content)) throw InvalidUtf8(path.string(), *bad);
  return parse_tatoeba(content);
}

inline Dataset parse_dataset(std::string_view content, std::uint64_t seed = 0) {
  std::vector<Sentence> sentences;
  detail::for_each_tsv_row(content, [&](std::size_t line, std::string_view code, std::string_view text) {
    const auto label = parse_label(code);
    if (!label) {
      throw ParseError("unknown label '" + std::string(code) + "' at line " + std::to_string(line));
    }
    if (auto s = make_sentence(*label, text)) sentences.push_back(std::move(*s));
  });
  return Dataset(std::move(sentences), seed);
}

inline Dataset read_dataset(const std::filesystem::path& path, std::uint64_t seed = 0) {
  const std::string content = read_file(path);
  if (auto bad = utf8::find_invalid(content)) throw InvalidUtf8(path.string(), *bad);
  return parse_dataset(content, seed);
}

inline std::string format_dataset(const Dataset& d) {
  std::string out;
  for (const auto& s : d) {
    out += code_of(s.label);
    out += '\t';
    out += s.text;
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError(path.string(), "cannot write");
  out << content;
  if (!out) throw FileError(path.string(), "write failed");
}

inline void write_dataset(const std::filesystem::path& path, const Dataset& d) {
  write_text_file(path, format_dataset(d));
}

// Flattens a pool into a dataset in label order.
inline Dataset pool_to_dataset(const SentencePool& pool, std::uint64_t seed = 0) {
  std::vector<Sentence> all;
  for (const auto& sentences : pool) all.insert(all.end(), sentences.begin(), sentences.end());
  return Dataset(std::move(all), seed);
}

}  // namespace nordiclid
