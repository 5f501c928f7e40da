#include "nordiclid/features.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

namespace nordiclid {
namespace {

using testing::sentence;

const std::string kExample =
    "hesbjerg er dannet ved sammenlægning af de gårde store hesbjerg og lille hesbjerg i ";

TEST(CharsetIndex, FortyCharactersInFixedOrder) {
  EXPECT_EQ(CharsetIndex::size(), 40u);
  EXPECT_EQ(kCharset.index(U'a'), 0u);
  EXPECT_EQ(kCharset.index(U'z'), 25u);
  EXPECT_EQ(kCharset.index(U'á'), 26u);
  EXPECT_EQ(kCharset.index(U'þ'), 38u);
  EXPECT_EQ(kCharset.index(U' '), 39u);
  EXPECT_FALSE(kCharset.contains(U'A'));
  for (std::size_t i = 0; i < CharsetIndex::size(); ++i) {
    EXPECT_EQ(kCharset.index(CharsetIndex::at(i)), i);
  }
}

TEST(CharNgrams, BigramListingOfWorkedExample) {
  const std::vector<std::string> expected = {
      "he", "es", "sb", "bj", "je", "er", "rg", "g ", " e", "er", "r ", " d", "da",
      "an", "nn", "ne", "et", "t ", " v", "ve", "ed", "d ", " s", "sa", "am", "mm",
      "me", "en", "nl", "læ", "æg", "gn", "ni", "in", "ng", "g ", " a"};
  const auto grams = extract_char_ngrams(kExample, 2);
  ASSERT_GE(grams.size(), expected.size());
  EXPECT_EQ(std::vector<std::string>(grams.begin(), grams.begin() + expected.size()), expected);
}

TEST(CharNgrams, TrivialCases) {
  EXPECT_TRUE(extract_char_ngrams("a", 2).empty());
  EXPECT_EQ(extract_char_ngrams("aba", 2), (std::vector<std::string>{"ab", "ba"}));
  EXPECT_EQ(extract_char_ngrams("åø", 1), (std::vector<std::string>{"å", "ø"}));
  EXPECT_THROW(extract_char_ngrams("ab", 0), InvalidArgument);
}

TEST(CharNgrams, CountMatchesWindowFormula) {
  std::mt19937 gen(3);
  std::uniform_int_distribution<std::size_t> len(0, 25), pick(0, 39), order(1, 5);
  for (int trial = 0; trial < 500; ++trial) {
    std::u32string text;
    for (std::size_t i = 0, n = len(gen); i < n; ++i) text.push_back(CharsetIndex::at(pick(gen)));
    const std::size_t n = order(gen);
    const auto grams = extract_char_ngrams(utf8::encode(text), n);
    EXPECT_EQ(grams.size(), text.size() >= n ? text.size() - n + 1 : 0);
    for (std::size_t i = 0; i < grams.size(); ++i) {
      EXPECT_EQ(utf8::decode(grams[i]), text.substr(i, n));
    }
  }
}

TEST(NgramVocabulary, SingleBigram) {
  const std::vector<Sentence> corpus = {sentence(Label::kDk, "ab")};
  const auto v = NgramVocabulary::build(corpus, 2);
  EXPECT_EQ(v.size(), 1u);
  EXPECT_EQ(v.find("ab"), 0u);
}

TEST(NgramVocabulary, FrequencyThenLexicographic) {
  const std::vector<Sentence> corpus = {sentence(Label::kDk, "aab"), sentence(Label::kSv, "aba")};
  const auto v = NgramVocabulary::build(corpus, 2);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v.find("ab"), 0u);
  EXPECT_EQ(v.find("aa"), 1u);
  EXPECT_EQ(v.find("ba"), 2u);
}

TEST(NgramVocabulary, UnigramsBoundedByAlphabet) {
  std::vector<Sentence> corpus = {sentence(Label::kIs, kExample),
                                  sentence(Label::kFo, "þetta er ein setningur á føroyskum "),
                                  sentence(Label::kSv, "åäö éíóúý ðþæø áz")};
  const auto v = NgramVocabulary::build(corpus, 1);
  EXPECT_LE(v.size(), 40u);
  const auto tri = NgramVocabulary::build(corpus, 3);
  EXPECT_LE(tri.size(), 64000u);
}

TEST(NgramVocabulary, CapKeepsMostFrequent) {
  const std::vector<Sentence> corpus = {sentence(Label::kDk, "aaab")};
  const auto v = NgramVocabulary::build(corpus, 1, 1);
  EXPECT_EQ(v.size(), 1u);
  EXPECT_EQ(v.gram(0), "a");
}

TEST(NgramVocabulary, EmptyCorpusRejected) {
  EXPECT_THROW(NgramVocabulary::build(std::vector<Sentence>{}, 2), InvalidArgument);
}

TEST(Vectorize, TrivialCases) {
  const NgramVocabulary v(2, {"ab", "ba"});
  const auto zero = vectorize("", v);
  EXPECT_EQ(zero.dim, 2u);
  EXPECT_TRUE(zero.entries.empty());
  const auto counts = vectorize("aba", v);
  EXPECT_EQ(counts.entries, (std::vector<std::pair<std::uint32_t, double>>{{0, 1.0}, {1, 1.0}}));
  const auto norm = vectorize("aba", v, Normalize::kYes);
  EXPECT_EQ(norm.entries, (std::vector<std::pair<std::uint32_t, double>>{{0, 0.5}, {1, 0.5}}));
  const auto oov = vectorize("xyz", v, Normalize::kYes);
  EXPECT_TRUE(oov.entries.empty());
}

TEST(Vectorize, MatchesBruteForceRecount) {
  std::mt19937 gen(11);
  std::uniform_int_distribution<std::size_t> len(0, 40), pick(0, 5);
  const std::u32string letters = U"abæø þ";
  auto random_text = [&] {
    std::u32string t;
    for (std::size_t i = 0, n = len(gen); i < n; ++i) t.push_back(letters[pick(gen)]);
    return utf8::encode(t);
  };
  std::vector<Sentence> corpus;
  for (int i = 0; i < 30; ++i) corpus.push_back(sentence(Label::kDk, random_text()));
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto vocab = NgramVocabulary::build(corpus, n);
    for (int trial = 0; trial < 100; ++trial) {
      const auto text = random_text();
      const auto fv = vectorize(text, vocab);
      const auto dense = fv.dense();
      const auto grams = extract_char_ngrams(text, n);
      for (std::size_t i = 0; i < vocab.size(); ++i) {
        const auto expected = std::count(grams.begin(), grams.end(), vocab.gram(i));
        EXPECT_EQ(dense[i], static_cast<double>(expected));
      }
      for (const auto& [i, c] : fv.entries) {
        EXPECT_LT(i, vocab.size());
        EXPECT_GT(c, 0.0);
      }
      const auto norm = vectorize(text, vocab, Normalize::kYes);
      if (!norm.entries.empty()) EXPECT_NEAR(norm.sum(), 1.0, 1e-9);
    }
  }
}

TEST(WordTokenize, WorkedExample) {
  EXPECT_EQ(word_tokenize(kExample),
            (std::vector<std::string>{"hesbjerg", "er", "dannet", "ved", "sammenlægning", "af",
                                      "de", "gårde", "store", "hesbjerg", "og", "lille",
                                      "hesbjerg", "i"}));
  EXPECT_TRUE(word_tokenize("").empty());
  EXPECT_EQ(word_tokenize("a  b"), (std::vector<std::string>{"a", "b"}));
}

TEST(WordVocabulary, RanksByFrequency) {
  const std::vector<Sentence> corpus = {sentence(Label::kDk, "i og er i "),
                                        sentence(Label::kNb, "i og huset "),
                                        sentence(Label::kNn, "i er ")};
  const auto v = WordVocabulary::build(corpus);
  EXPECT_EQ(v.rank("i"), 1u);
  // "er" and "og" both occur twice: lexicographic order decides.
  EXPECT_EQ(v.rank("er"), 2u);
  EXPECT_EQ(v.rank("og"), 3u);
  EXPECT_EQ(v.rank("huset"), 4u);
  EXPECT_EQ(v.rank("nope"), std::nullopt);
}

TEST(WordVocabulary, TrivialCases) {
  const auto v = WordVocabulary::build(std::vector<Sentence>{sentence(Label::kDk, "a b a")});
  EXPECT_EQ(v.rank("a"), 1u);
  EXPECT_EQ(v.rank("b"), 2u);
  const auto tie = WordVocabulary::build(std::vector<Sentence>{sentence(Label::kDk, "b a")});
  EXPECT_EQ(tie.rank("a"), 1u);
  EXPECT_EQ(tie.rank("b"), 2u);
  EXPECT_EQ(vectorize_words("a b c a", v).entries,
            (std::vector<std::pair<std::uint32_t, double>>{{0, 2.0}, {1, 1.0}}));
}

TEST(CharProfile, ThornOnlyInIcelandic) {
  SentencePool pool;
  pool[index_of(Label::kIs)].push_back(sentence(Label::kIs, "það er þú "));
  pool[index_of(Label::kFo)].push_back(sentence(Label::kFo, "hetta er ðað "));
  pool[index_of(Label::kDk)].push_back(sentence(Label::kDk, "det er dig "));
  const auto p = char_frequency_profile(pool);
  const auto thorn = *kCharset.index(U'þ');
  for (Label l : kAllLabels) {
    if (l == Label::kIs) {
      EXPECT_EQ(p.counts[index_of(l)][thorn], 2.0);
      EXPECT_EQ(p.normalized[index_of(l)][thorn], 1.0);
    } else {
      EXPECT_EQ(p.counts[index_of(l)][thorn], 0.0);
    }
  }
}

TEST(CharProfile, CountsAndNormalizedColumns) {
  SentencePool pool;
  pool[index_of(Label::kSv)].push_back(sentence(Label::kSv, "ab "));
  const auto p = char_frequency_profile(pool);
  const auto& sv = p.counts[index_of(Label::kSv)];
  EXPECT_EQ(sv[*kCharset.index(U'a')], 1.0);
  EXPECT_EQ(sv[*kCharset.index(U'b')], 1.0);
  EXPECT_EQ(sv[*kCharset.index(U' ')], 1.0);
  EXPECT_EQ(std::accumulate(sv.begin(), sv.end(), 0.0), 3.0);
  EXPECT_EQ(p.normalized[index_of(Label::kSv)][*kCharset.index(U'a')], 1.0);

  pool[index_of(Label::kDk)].push_back(sentence(Label::kDk, "aaa"));
  const auto q = char_frequency_profile(pool);
  for (std::size_t c = 0; c < kAlphabetSize; ++c) {
    double col = 0.0, raw = 0.0;
    for (std::size_t l = 0; l < kNumLabels; ++l) {
      col += q.normalized[l][c];
      raw += q.counts[l][c];
    }
    if (raw > 0.0) {
      EXPECT_NEAR(col, 1.0, 1e-12);
    } else {
      EXPECT_EQ(col, 0.0);
    }
  }
  EXPECT_DOUBLE_EQ(q.normalized[index_of(Label::kDk)][0], 0.75);
}

TEST(VocabularyFile, RoundTrip) {
  const NgramVocabulary v(2, {"ab", "g ", " æ"});
  const auto text = format_vocabulary(v.index());
  EXPECT_EQ(text, "ab\t0\ng \t1\n æ\t2\n");
  EXPECT_EQ(parse_vocabulary(text), v.index().tokens());
  EXPECT_THROW(parse_vocabulary("ab\t1\n"), ParseError);
}

}  // namespace
}  // namespace nordiclid
