#pragma once

// Seeded synthetic six-language corpus. A shared proto lexicon is realised
// per language through sound-correspondence tables, inflectional suffixes and
// real high-frequency function words, so related languages (dk/nb/nn,
// is/fo) overlap heavily. Two genres differ in sentence length, function-word
// mix and topic vocabulary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nordiclid/corpus.hpp"
#include "nordiclid/label.hpp"
#include "nordiclid/rng.hpp"
#include "nordiclid/utf8.hpp"

namespace nordiclid {

enum class Genre { kEncyclopedic, kConversational };

namespace synth {

// Zipf-distributed choice over n items.
class Zipf {
 public:
  Zipf(std::size_t n, double exponent) : cumulative_(n) {
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      total += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
      cumulative_[r] = total;
    }
  }

  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

// Proto symbols: lowercase consonants and short vowels are shared; uppercase
// A E I O U Y are long vowels, W and Q diphthongs and T a dental fricative.
struct Phonology {
  std::map<char, std::string> realise;
  std::string initial_t;  // realisation of T word-initially
  bool soften_final_stops = false;
  std::vector<std::pair<std::string, double>> suffixes;
  std::vector<std::string> function_words;
  std::vector<std::string> chat_words;  // conversational register
};

inline const std::vector<std::string>& shared_names() {
  static const std::vector<std::string> names{
      "london", "paris", "berlin", "europa", "amerika", "napoleon", "maria", "peter", "anna", "john",
      "tom", "roma", "afrika", "asia", "kristus", "google", "facebook", "internet", "radio", "video",
      "hotel", "taxi", "pizza", "film", "musik", "jazz", "rock", "bus", "golf", "tennis"};
  return names;
}

inline PerLabel<Phonology> phonologies() {
  PerLabel<Phonology> p;
  auto base = [](std::string a, std::string e, std::string i, std::string o, std::string u, std::string y,
                 std::string w, std::string q, std::string t) {
    std::map<char, std::string> m;
    for (char c : std::string("abdefghijklmnoprstuvy")) m[c] = std::string(1, c);
    m['A'] = std::move(a);
    m['E'] = std::move(e);
    m['I'] = std::move(i);
    m['O'] = std::move(o);
    m['U'] = std::move(u);
    m['Y'] = std::move(y);
    m['W'] = std::move(w);
    m['Q'] = std::move(q);
    m['T'] = std::move(t);
    return m;
  };

  auto& dk = p[index_of(Label::kDk)];
  dk.realise = base("å", "æ", "i", "ø", "u", "y", "ø", "e", "d");
  dk.initial_t = "t";
  dk.soften_final_stops = true;
  dk.suffixes = {{"", 4}, {"en", 2}, {"et", 2}, {"er", 2}, {"e", 2}, {"ene", 1}, {"ede", 1}, {"lig", 0.5}};
  dk.function_words = {"og", "i", "at", "det", "er", "en", "til", "på", "som", "de", "med", "han", "af",
                       "for", "ikke", "der", "var", "sig", "men", "et", "har", "om", "efter", "blev",
                       "fra", "også", "under", "hvor", "mellem", "deres", "nogle", "mange", "kunne",
                       "eller", "denne", "dette", "disse", "hvis", "blive", "været", "ud", "op"};
  dk.chat_words = {"jeg", "du", "ikke", "hvad", "mig", "dig", "vi", "hun", "han", "det", "er", "har",
                   "vil", "kan", "skal", "meget", "godt", "nu", "her", "hvorfor", "hvordan", "tak", "ja",
                   "nej", "jo", "lige", "noget", "gerne", "sgu", "altså"};

  auto& nb = p[index_of(Label::kNb)];
  nb.realise = base("å", "e", "i", "ø", "u", "y", "au", "ei", "t");
  nb.initial_t = "t";
  nb.suffixes = {{"", 4}, {"en", 2}, {"et", 2}, {"er", 2}, {"e", 2}, {"ene", 1}, {"a", 1}, {"lig", 0.5}};
  nb.function_words = {"og", "i", "at", "det", "er", "en", "til", "på", "som", "de", "med", "han", "av",
                       "for", "ikke", "der", "var", "seg", "men", "et", "har", "om", "etter", "ble",
                       "fra", "også", "under", "hvor", "mellom", "deres", "noen", "mange", "kunne",
                       "eller", "denne", "dette", "disse", "hvis", "bli", "vært", "ut", "opp"};
  nb.chat_words = {"jeg", "du", "ikke", "hva", "meg", "deg", "vi", "hun", "han", "det", "er", "har",
                   "vil", "kan", "skal", "veldig", "bra", "nå", "her", "hvorfor", "hvordan", "takk",
                   "ja", "nei", "jo", "bare", "noe", "gjerne", "altså", "liksom"};

  auto& nn = p[index_of(Label::kNn)];
  nn.realise = base("å", "e", "i", "ø", "u", "y", "au", "ei", "t");
  nn.initial_t = "t";
  nn.suffixes = {{"", 4}, {"en", 1.5}, {"et", 2}, {"ar", 2}, {"e", 1.5}, {"ane", 1}, {"a", 2}, {"leg", 0.5}};
  nn.function_words = {"og", "i", "at", "det", "er", "ein", "til", "på", "som", "dei", "med", "han", "av",
                       "for", "ikkje", "der", "var", "seg", "men", "eit", "har", "om", "etter", "vart",
                       "frå", "òg", "under", "kvar", "mellom", "deira", "nokre", "mange", "kunne",
                       "eller", "denne", "dette", "desse", "viss", "bli", "vore", "ut", "opp"};
  nn.chat_words = {"eg", "du", "ikkje", "kva", "meg", "deg", "vi", "ho", "han", "det", "er", "har",
                   "vil", "kan", "skal", "veldig", "bra", "no", "her", "kvifor", "korleis", "takk",
                   "ja", "nei", "jo", "berre", "noko", "gjerne", "altså", "liksom"};

  auto& sv = p[index_of(Label::kSv)];
  sv.realise = base("å", "ä", "i", "ö", "u", "y", "ö", "e", "t");
  sv.initial_t = "t";
  sv.suffixes = {{"", 4}, {"en", 2}, {"et", 1.5}, {"ar", 2}, {"or", 1}, {"na", 1}, {"a", 2}, {"lig", 0.5}};
  sv.function_words = {"och", "i", "att", "det", "är", "en", "till", "på", "som", "de", "med", "han", "av",
                       "för", "inte", "där", "var", "sig", "men", "ett", "har", "om", "efter", "blev",
                       "från", "också", "under", "var", "mellan", "deras", "några", "många", "kunde",
                       "eller", "denna", "detta", "dessa", "om", "bli", "varit", "ut", "upp"};
  sv.chat_words = {"jag", "du", "inte", "vad", "mig", "dig", "vi", "hon", "han", "det", "är", "har",
                   "vill", "kan", "ska", "mycket", "bra", "nu", "här", "varför", "hur", "tack", "ja",
                   "nej", "ju", "bara", "något", "gärna", "alltså", "typ"};

  auto& fo = p[index_of(Label::kFo)];
  fo.realise = base("á", "æ", "í", "ø", "ú", "ý", "ey", "ei", "ð");
  fo.initial_t = "t";
  fo.suffixes = {{"", 3}, {"ur", 2.5}, {"ar", 2}, {"ir", 1.5}, {"in", 1.5}, {"ið", 1.5}, {"a", 1.5}, {"um", 1}};
  fo.function_words = {"og", "í", "at", "tað", "er", "ein", "til", "á", "sum", "teir", "við", "hann", "av",
                       "fyri", "ikki", "har", "var", "seg", "men", "eitt", "hevur", "um", "eftir", "varð",
                       "frá", "eisini", "undir", "hvar", "millum", "teirra", "nakrir", "nógvir", "kundi",
                       "ella", "hesin", "hetta", "hesir", "um", "verða", "verið", "út", "upp"};
  fo.chat_words = {"eg", "tú", "ikki", "hvat", "meg", "teg", "vit", "hon", "hann", "tað", "er", "havi",
                   "vil", "kann", "skal", "sera", "gott", "nú", "her", "hví", "hvussu", "takk", "ja",
                   "nei", "jú", "bara", "nakað", "fegin", "so", "tá"};

  auto& is = p[index_of(Label::kIs)];
  is.realise = base("á", "é", "í", "ó", "ú", "ý", "au", "ei", "ð");
  is.initial_t = "þ";
  is.suffixes = {{"", 3}, {"ur", 2.5}, {"ar", 2}, {"ir", 1.5}, {"inn", 1.5}, {"ið", 1.5}, {"a", 1.5}, {"um", 1}};
  is.function_words = {"og", "í", "að", "það", "er", "einn", "til", "á", "sem", "þeir", "með", "hann", "af",
                       "fyrir", "ekki", "þar", "var", "sig", "en", "eitt", "hefur", "um", "eftir", "varð",
                       "frá", "einnig", "undir", "hvar", "milli", "þeirra", "nokkrir", "margir", "gat",
                       "eða", "þessi", "þetta", "þessir", "ef", "verða", "verið", "út", "upp"};
  is.chat_words = {"ég", "þú", "ekki", "hvað", "mig", "þig", "við", "hún", "hann", "það", "er", "hef",
                   "vil", "get", "skal", "mjög", "gott", "núna", "hér", "af hverju", "hvernig", "takk",
                   "já", "nei", "jú", "bara", "eitthvað", "gjarnan", "sko", "þá"};
  return p;
}

}  // namespace synth

class SyntheticCorpus {
 public:
  static constexpr std::size_t kRoots = 1500;
  static constexpr double kBorrowRate = 0.05;

  static Label neighbour(Label l) {
    switch (l) {
      case Label::kDk: return Label::kNb;
      case Label::kSv: return Label::kNb;
      case Label::kNn: return Label::kNb;
      case Label::kNb: return Label::kDk;
      case Label::kFo: return Label::kDk;
      case Label::kIs: return Label::kFo;
    }
    return l;
  }

  explicit SyntheticCorpus(std::uint64_t lexicon_seed = 2024) : phon_(synth::phonologies()) {
    Rng rng(lexicon_seed);
    roots_.reserve(kRoots);
    for (std::size_t i = 0; i < kRoots; ++i) roots_.push_back(make_root(rng));
    for (const auto& ph : phon_) {
      std::vector<double> w;
      for (const auto& s : ph.suffixes) w.push_back(s.second);
      suffix_weights_.push_back(w);
    }
  }

  const std::string& root(std::size_t i) const { return roots_[i]; }

  // Content word for root i in language l, without inflection.
  std::string realise(Label l, std::string_view proto) const {
    const auto& ph = phon_[index_of(l)];
    std::string out;
    for (std::size_t i = 0; i < proto.size(); ++i) {
      const char c = proto[i];
      if (c == 'T' && i == 0) {
        out += ph.initial_t;
        continue;
      }
      std::string r = ph.realise.at(c);
      const bool last = i + 1 == proto.size();
      if (ph.soften_final_stops && last && i > 0 && is_vowel(proto[i - 1])) {
        if (c == 'p') r = "b";
        if (c == 't') r = "d";
        if (c == 'k') r = "g";
      }
      out += r;
    }
    return out;
  }

  // One raw sentence: capitalised, with terminal punctuation.
  std::string raw_sentence(Label l, Genre genre, Rng& rng) const {
    const auto& ph = phon_[index_of(l)];
    const bool chat = genre == Genre::kConversational;
    const std::size_t len = chat ? 2 + rng.uniform_index(6) : 6 + rng.uniform_index(10) + rng.uniform_index(15);
    // Encyclopedic text draws from the first topic block, chat from an
    // overlapping later block.
    const std::size_t topic_lo = chat ? 600 : 0;
    const synth::Zipf& topic = chat ? chat_topic_ : encyclopedic_topic_;
    const synth::Zipf function_zipf(ph.function_words.size(), 1.0);
    const synth::Zipf chat_zipf(ph.chat_words.size(), 0.8);
    std::string out;
    for (std::size_t w = 0; w < len; ++w) {
      const double u = rng.uniform();
      std::string word;
      if (u < (chat ? 0.12 : 0.04)) {
        const auto& names = synth::shared_names();
        word = names[rng.uniform_index(names.size())];
        word[0] = static_cast<char>(word[0] - 'a' + 'A');
      } else if (chat && u < 0.55) {
        word = ph.chat_words[chat_zipf.draw(rng)];
      } else if (u < (chat ? 0.65 : 0.40)) {
        word = ph.function_words[function_zipf.draw(rng)];
      } else {
        const std::size_t r = topic_lo + topic.draw(rng);
        // Loans and mixed forms from the closest neighbour language.
        const Label src = rng.uniform() < kBorrowRate ? neighbour(l) : l;
        word = realise(src, roots_[r]) + phon_[index_of(src)].suffixes[draw_weighted(suffix_weights_[index_of(src)], rng)].first;
      }
      if (!out.empty()) out += ' ';
      out += word;
    }
    capitalise(out);
    out += chat && rng.uniform() < 0.3 ? "?" : ".";
    return out;
  }

  // Raw text for one label: one sentence per line.
  std::string raw_text(Label l, std::size_t sentences, Genre genre, std::uint64_t seed) const {
    Rng rng(seed ^ (0x1000 * (index_of(l) + 1)) ^ (genre == Genre::kConversational ? 0xC0FFEEull : 0));
    std::string out;
    for (std::size_t i = 0; i < sentences; ++i) out += raw_sentence(l, genre, rng) + "\n";
    return out;
  }

  // Cleaned sentences, exactly `per_label` per label.
  SentencePool pool(std::size_t per_label, Genre genre, std::uint64_t seed) const {
    SentencePool p;
    for (auto l : kAllLabels) {
      Rng rng(seed ^ (0x1000 * (index_of(l) + 1)) ^ (genre == Genre::kConversational ? 0xC0FFEEull : 0));
      auto& bucket = p[index_of(l)];
      while (bucket.size() < per_label) {
        if (auto s = make_sentence(l, raw_sentence(l, genre, rng))) bucket.push_back(std::move(*s));
      }
    }
    return p;
  }

 private:
  static bool is_vowel(char c) { return std::string_view("aeiouyAEIOUYWQ").find(c) != std::string_view::npos; }

  static std::size_t draw_weighted(const std::vector<double>& w, Rng& rng) {
    double total = 0.0;
    for (double x : w) total += x;
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (u < w[i]) return i;
      u -= w[i];
    }
    return w.size() - 1;
  }

  static std::string make_root(Rng& rng) {
    static const std::vector<std::string> onsets{"", "b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r",
                                                 "s", "t", "v", "j", "T", "bl", "br", "dr", "fl", "fr",
                                                 "gr", "kl", "kr", "pr", "sk", "sl", "sn", "sp", "st", "tr"};
    static const std::vector<std::string> vowels{"a", "e", "i", "o", "u", "y", "a", "e", "i", "o",
                                                 "A", "E", "I", "O", "U", "Y", "W", "Q"};
    static const std::vector<std::string> codas{"", "", "", "k", "t", "p", "n", "l", "r", "s", "m",
                                                "g", "d", "nd", "ld", "rk", "st", "ng", "ll", "nn", "T"};
    const std::size_t syllables = 1 + rng.uniform_index(3);
    std::string root;
    for (std::size_t s = 0; s < syllables; ++s) {
      root += onsets[rng.uniform_index(onsets.size())];
      if (s > 0 && root.back() == 'T') root.back() = 't';
      root += vowels[rng.uniform_index(vowels.size())];
      if (s + 1 == syllables || rng.uniform() < 0.4) root += codas[rng.uniform_index(codas.size())];
    }
    return root;
  }

  static void capitalise(std::string& s) {
    std::size_t pos = 0;
    if (s.empty()) return;
    const auto cp = utf8::decode_one(s, pos);
    if (!cp || *cp >= 0x80 || *cp < 'a' || *cp > 'z') return;
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
  }

  PerLabel<synth::Phonology> phon_;
  std::vector<std::string> roots_;
  std::vector<std::vector<double>> suffix_weights_;
  synth::Zipf encyclopedic_topic_{1000, 1.0};
  synth::Zipf chat_topic_{900, 1.0};
};

}  // namespace nordiclid
