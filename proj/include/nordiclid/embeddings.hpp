#pragma once

// Word embeddings trained with negative sampling (CBOW and skip-gram with
// hashed subword n-grams) and a supervised bag-of-features softmax classifier.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nordiclid/corpus.hpp"
#include "nordiclid/error.hpp"
#include "nordiclid/features.hpp"
#include "nordiclid/label.hpp"
#include "nordiclid/math.hpp"
#include "nordiclid/rng.hpp"

namespace nordiclid {

enum class EmbeddingMode { kCbow, kSkipgram };

struct EmbeddingConfig {
  EmbeddingMode mode = EmbeddingMode::kSkipgram;
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.05;  // decays linearly to zero over training
  std::size_t subword_min = 3;
  std::size_t subword_max = 6;
  std::uint32_t bucket_count = 1u << 20;
  std::uint64_t seed = 42;
};

inline void validate(const EmbeddingConfig& c) {
  if (c.dim < 1 || c.window < 1 || c.negatives < 1) {
    throw InvalidArgument("dim, window and negatives must be at least 1");
  }
  if (c.subword_min < 1 || c.subword_min > c.subword_max) {
    throw InvalidArgument("subword range must satisfy 1 <= min <= max");
  }
  if (c.bucket_count == 0) throw InvalidArgument("bucket count must be positive");
  if (!(c.learning_rate >= 0.0)) throw InvalidArgument("learning rate must be non-negative");
}

// 32-bit FNV-1a.
inline std::uint32_t fnv1a(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 16777619u;
  }
  return h;
}

// Character n-grams of "<word>" with lengths in [min_n, max_n], shortest
// first, followed by the whole marked word if not already present.
inline std::vector<std::string> subword_ngrams(std::string_view word, std::size_t min_n,
                                               std::size_t max_n) {
  if (word.empty()) throw InvalidArgument("subword_ngrams requires a non-empty word");
  const std::string marked = "<" + std::string(word) + ">";
  const auto chars = split_chars(marked);
  std::vector<std::string> out;
  for (std::size_t n = min_n; n <= max_n && n <= chars.size(); ++n) {
    for (std::size_t i = 0; i + n <= chars.size(); ++i) {
      std::string g;
      for (std::size_t j = i; j < i + n; ++j) g += chars[j];
      if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(std::move(g));
    }
  }
  if (std::find(out.begin(), out.end(), marked) == out.end()) out.push_back(marked);
  return out;
}

// Input rows are the vocabulary words followed by the hash buckets that some
// vocabulary word uses (skip-gram only). Buckets never touched by the
// vocabulary get no row.
struct EmbeddingModel {
  EmbeddingConfig config;
  WordVocabulary words;
  std::vector<std::uint32_t> buckets;             // hashed bucket id of each subword row
  std::vector<std::vector<std::uint32_t>> rows;   // input rows composing each word
  Matrix input;                                   // (words + buckets) x dim
  Matrix output;                                  // words x dim

  std::size_t dim() const { return input.cols(); }
};

struct EmbeddingStats {
  std::vector<double> epoch_loss;  // mean negative-sampling loss per update
};

// Word table, subword rows and seeded initialisation; no training.
inline EmbeddingModel init_embedding(std::span<const Sentence> corpus, const EmbeddingConfig& cfg) {
  validate(cfg);
  EmbeddingModel m;
  m.config = cfg;
  m.words = WordVocabulary::build(corpus);
  if (m.words.size() == 0) throw EmptyVocabulary();
  const std::size_t nwords = m.words.size();
  m.rows.resize(nwords);
  std::unordered_map<std::uint32_t, std::uint32_t> bucket_row;
  for (std::size_t w = 0; w < nwords; ++w) {
    m.rows[w].push_back(static_cast<std::uint32_t>(w));
    if (cfg.mode != EmbeddingMode::kSkipgram) continue;
    for (const auto& g : subword_ngrams(m.words.word_at_rank(w + 1), cfg.subword_min, cfg.subword_max)) {
      const std::uint32_t bucket = fnv1a(g) % cfg.bucket_count;
      auto [it, inserted] = bucket_row.emplace(bucket, static_cast<std::uint32_t>(nwords + m.buckets.size()));
      if (inserted) m.buckets.push_back(bucket);
      auto& r = m.rows[w];
      if (std::find(r.begin(), r.end(), it->second) == r.end()) r.push_back(it->second);
    }
  }
  m.input = Matrix(nwords + m.buckets.size(), cfg.dim, 0.0);
  m.output = Matrix(nwords, cfg.dim, 0.0);
  Rng rng(cfg.seed);
  const double bound = 1.0 / static_cast<double>(cfg.dim);
  for (auto& v : m.input.values()) v = rng.uniform(-bound, bound);
  return m;
}

namespace detail {

inline void axpy_row(std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += x[i];
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

class NegativeSampler {
 public:
  NegativeSampler(std::span<const std::size_t> counts) : cumulative_(counts.size()) {
    double total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      total += std::pow(static_cast<double>(counts[i]), 0.75);
      cumulative_[i] = total;
    }
  }

  std::uint32_t draw(Rng& rng) const {
    const double r = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    if (it == cumulative_.end()) --it;
    return static_cast<std::uint32_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

// One negative-sampling step: predict `target` from the mean of `rows`.
// Returns the loss before the update.
inline double ns_update(EmbeddingModel& m, std::span<const std::uint32_t> rows, std::uint32_t target,
                        double lr, const NegativeSampler& sampler, Rng& rng) {
  const std::size_t d = m.dim();
  std::vector<double> h(d, 0.0);
  for (auto r : rows) axpy_row(m.input.row(r), h);
  for (auto& v : h) v /= static_cast<double>(rows.size());
  std::vector<double> grad_h(d, 0.0);
  double loss = 0.0;
  auto step = [&](std::uint32_t word, double label) {
    auto out = m.output.row(word);
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += h[i] * out[i];
    loss -= label > 0.0 ? log_sigmoid(s) : log_sigmoid(-s);
    const double g = lr * (label - sigmoid(s));
    for (std::size_t i = 0; i < d; ++i) {
      grad_h[i] += g * out[i];
      out[i] += g * h[i];
    }
  };
  step(target, 1.0);
  const std::size_t vocab = m.output.rows();
  for (std::size_t k = 0; k < m.config.negatives; ++k) {
    std::uint32_t neg = sampler.draw(rng);
    if (neg == target) {
      if (vocab == 1) break;
      continue;
    }
    step(neg, 0.0);
  }
  const double share = 1.0 / static_cast<double>(rows.size());
  for (auto r : rows) {
    auto in = m.input.row(r);
    for (std::size_t i = 0; i < d; ++i) in[i] += share * grad_h[i];
  }
  return loss;
}

}  // namespace detail

namespace detail {

inline std::vector<std::vector<std::uint32_t>> encode_corpus(std::span<const Sentence> corpus,
                                                             const WordVocabulary& words,
                                                             std::vector<std::size_t>& counts) {
  counts.assign(words.size(), 0);
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) {
    std::vector<std::uint32_t> ids;
    for (const auto& w : word_tokenize(s.text)) {
      if (auto i = words.index().find(w)) {
        ids.push_back(*i);
        ++counts[*i];
      }
    }
    out.push_back(std::move(ids));
  }
  return out;
}

inline EmbeddingModel train_embedding(std::span<const Sentence> corpus, const EmbeddingConfig& cfg,
                                      EmbeddingStats* stats) {
  if (corpus.empty()) throw EmptyVocabulary();
  EmbeddingModel m = init_embedding(corpus, cfg);
  std::vector<std::size_t> counts;
  const auto encoded = encode_corpus(corpus, m.words, counts);
  const NegativeSampler sampler(counts);
  const double total_tokens = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  const double schedule = total_tokens * static_cast<double>(cfg.epochs);
  // Training draws from a stream separate from initialisation.
  Rng rng(cfg.seed ^ 0x9E3779B97F4A7C15ull);
  double processed = 0.0;
  std::vector<std::uint32_t> context;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss = 0.0;
    std::size_t updates = 0;
    for (const auto& ids : encoded) {
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const double lr = cfg.learning_rate * std::max(0.0, 1.0 - processed / schedule);
        processed += 1.0;
        const std::size_t b = 1 + rng.uniform_index(cfg.window);
        const std::size_t lo = i >= b ? i - b : 0;
        const std::size_t hi = std::min(ids.size() - 1, i + b);
        if (cfg.mode == EmbeddingMode::kSkipgram) {
          for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            loss += ns_update(m, m.rows[ids[i]], ids[j], lr, sampler, rng);
            ++updates;
          }
        } else {
          context.clear();
          for (std::size_t j = lo; j <= hi; ++j) {
            if (j != i) context.push_back(ids[j]);
          }
          if (context.empty()) continue;
          loss += ns_update(m, context, ids[i], lr, sampler, rng);
          ++updates;
        }
      }
    }
    if (stats) stats->epoch_loss.push_back(updates ? loss / static_cast<double>(updates) : 0.0);
  }
  for (double v : m.input.values()) {
    if (!std::isfinite(v)) throw NumericalError("embedding training diverged");
  }
  return m;
}

}  // namespace detail

inline EmbeddingModel train_skipgram(std::span<const Sentence> corpus, EmbeddingConfig cfg,
                                     EmbeddingStats* stats = nullptr) {
  cfg.mode = EmbeddingMode::kSkipgram;
  return detail::train_embedding(corpus, cfg, stats);
}

inline EmbeddingModel train_cbow(std::span<const Sentence> corpus, EmbeddingConfig cfg,
                                 EmbeddingStats* stats = nullptr) {
  cfg.mode = EmbeddingMode::kCbow;
  return detail::train_embedding(corpus, cfg, stats);
}

inline EmbeddingModel train_embedding(std::span<const Sentence> corpus, const EmbeddingConfig& cfg,
                                      EmbeddingStats* stats = nullptr) {
  return detail::train_embedding(corpus, cfg, stats);
}

// Mean of the word's own row and its subword rows. Empty for unknown words.
inline std::vector<double> word_vector(const EmbeddingModel& m, std::string_view word) {
  auto id = m.words.index().find(word);
  if (!id) return {};
  std::vector<double> v(m.dim(), 0.0);
  const auto& rows = m.rows[*id];
  for (auto r : rows) detail::axpy_row(m.input.row(r), v);
  for (auto& x : v) x /= static_cast<double>(rows.size());
  return v;
}

// Score the output layer gives `context` when predicting from `center`.
inline double pair_score(const EmbeddingModel& m, std::string_view center, std::string_view context) {
  const auto v = word_vector(m, center);
  auto id = m.words.index().find(context);
  if (v.empty() || !id) throw InvalidArgument("pair_score on out-of-vocabulary word");
  const auto out = m.output.row(*id);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * out[i];
  return s;
}

inline std::vector<double> sentence_embedding(std::string_view text, const EmbeddingModel& m) {
  std::vector<double> sum(m.dim(), 0.0);
  std::size_t known = 0;
  for (const auto& w : word_tokenize(text)) {
    auto v = word_vector(m, w);
    if (v.empty()) continue;
    for (std::size_t i = 0; i < v.size(); ++i) sum[i] += v[i];
    ++known;
  }
  if (known > 0) {
    for (auto& x : sum) x /= static_cast<double>(known);
  }
  return sum;
}

// Composed vectors for every vocabulary word; all a sentence encoder needs.
struct WordVectors {
  WordVocabulary words;
  Matrix vectors;  // words x dim, row = rank - 1
};

inline WordVectors word_vectors(const EmbeddingModel& m) {
  WordVectors wv{m.words, Matrix(m.words.size(), m.dim(), 0.0)};
  for (std::size_t w = 0; w < m.words.size(); ++w) {
    const auto v = word_vector(m, m.words.word_at_rank(w + 1));
    std::copy(v.begin(), v.end(), wv.vectors.row(w).begin());
  }
  return wv;
}

inline std::vector<double> sentence_embedding(std::string_view text, const WordVectors& wv) {
  std::vector<double> sum(wv.vectors.cols(), 0.0);
  std::size_t known = 0;
  for (const auto& w : word_tokenize(text)) {
    auto id = wv.words.index().find(w);
    if (!id) continue;
    detail::axpy_row(wv.vectors.row(*id), sum);
    ++known;
  }
  if (known > 0) {
    for (auto& x : sum) x /= static_cast<double>(known);
  }
  return sum;
}

// --- supervised classifier -------------------------------------------------

enum class FastTextFeatures { kWords, kCharNgrams };

struct FastTextConfig {
  FastTextFeatures features = FastTextFeatures::kWords;
  std::size_t min_n = 1;  // char n-gram range when features = kCharNgrams
  std::size_t max_n = 5;
  std::size_t dim = 100;
  std::size_t epochs = 5;
  double learning_rate = 0.1;  // decays linearly to zero over training
  std::uint64_t seed = 42;
};

inline void validate(const FastTextConfig& c) {
  if (c.dim < 1) throw InvalidArgument("dim must be at least 1");
  if (c.min_n < 1 || c.min_n > c.max_n) throw InvalidArgument("n-gram range must satisfy 1 <= min <= max");
  if (!(c.learning_rate >= 0.0)) throw InvalidArgument("learning rate must be non-negative");
}

struct FastTextModel {
  FastTextConfig config;
  TokenIndex features;
  Matrix input;   // features x dim
  Matrix output;  // dim x 6, columns in label order
  std::vector<double> bias = std::vector<double>(kNumLabels, 0.0);
};

inline std::vector<std::string> fasttext_tokens(std::string_view text, const FastTextConfig& cfg) {
  if (cfg.features == FastTextFeatures::kWords) return word_tokenize(text);
  std::vector<std::string> out;
  for (std::size_t n = cfg.min_n; n <= cfg.max_n; ++n) {
    auto grams = extract_char_ngrams(text, n);
    out.insert(out.end(), std::make_move_iterator(grams.begin()), std::make_move_iterator(grams.end()));
  }
  return out;
}

// In-vocabulary feature ids with multiplicity.
inline std::vector<std::uint32_t> fasttext_features(const FastTextModel& m, std::string_view text) {
  std::vector<std::uint32_t> ids;
  for (const auto& t : fasttext_tokens(text, m.config)) {
    if (auto i = m.features.find(t)) ids.push_back(*i);
  }
  return ids;
}

inline FastTextModel make_fasttext(std::span<const Sentence> corpus, const FastTextConfig& cfg) {
  validate(cfg);
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& s : corpus) {
    for (auto& t : fasttext_tokens(s.text, cfg)) ++counts[std::move(t)];
  }
  if (counts.empty()) throw EmptyVocabulary();
  FastTextModel m;
  m.config = cfg;
  m.features = TokenIndex(detail::rank_by_frequency(counts, std::nullopt));
  m.input = Matrix(m.features.size(), cfg.dim, 0.0);
  m.output = Matrix(cfg.dim, kNumLabels, 0.0);
  Rng rng(cfg.seed);
  const double bound = 1.0 / static_cast<double>(cfg.dim);
  for (auto& v : m.input.values()) v = rng.uniform(-bound, bound);
  return m;
}

namespace detail {

inline std::vector<double> fasttext_hidden(const FastTextModel& m, std::span<const std::uint32_t> ids) {
  std::vector<double> h(m.input.cols(), 0.0);
  if (ids.empty()) return h;
  for (auto id : ids) axpy_row(m.input.row(id), h);
  for (auto& x : h) x /= static_cast<double>(ids.size());
  return h;
}

inline std::vector<double> fasttext_posterior(const FastTextModel& m, std::span<const double> h) {
  std::vector<double> z(m.bias);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto w = m.output.row(i);
    for (std::size_t k = 0; k < kNumLabels; ++k) z[k] += h[i] * w[k];
  }
  return softmax(z);
}

}  // namespace detail

inline Prediction predict_fasttext_ids(const FastTextModel& m, std::span<const std::uint32_t> ids) {
  auto p = detail::fasttext_posterior(m, detail::fasttext_hidden(m, ids));
  const Label y = argmax_label(p);
  return {y, std::move(p)};
}

inline Prediction predict_fasttext(const FastTextModel& m, std::string_view text) {
  return predict_fasttext_ids(m, fasttext_features(m, text));
}

struct FastTextExample {
  std::vector<std::uint32_t> ids;
  Label y;
};

inline std::vector<FastTextExample> fasttext_encode(const FastTextModel& m, std::span<const Sentence> data) {
  std::vector<FastTextExample> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back({fasttext_features(m, s.text), s.label});
  return out;
}

// Mean cross-entropy over `data`; when `grad` is given it receives the
// gradient with the same shapes as the model.
inline double fasttext_objective(const FastTextModel& m, std::span<const FastTextExample> data,
                                 FastTextModel* grad = nullptr) {
  if (grad) {
    grad->config = m.config;
    grad->features = m.features;
    grad->input = Matrix(m.input.rows(), m.input.cols(), 0.0);
    grad->output = Matrix(m.output.rows(), m.output.cols(), 0.0);
    grad->bias.assign(kNumLabels, 0.0);
  }
  if (data.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(data.size());
  double loss = 0.0;
  const std::size_t d = m.input.cols();
  for (const auto& ex : data) {
    const auto h = detail::fasttext_hidden(m, ex.ids);
    auto p = detail::fasttext_posterior(m, h);
    const std::size_t y = index_of(ex.y);
    loss += cce_loss(p, ex.y);
    if (!grad) continue;
    p[y] -= 1.0;
    std::vector<double> dh(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      auto g = grad->output.row(i);
      const auto w = m.output.row(i);
      for (std::size_t k = 0; k < kNumLabels; ++k) {
        g[k] += scale * h[i] * p[k];
        dh[i] += w[k] * p[k];
      }
    }
    for (std::size_t k = 0; k < kNumLabels; ++k) grad->bias[k] += scale * p[k];
    if (ex.ids.empty()) continue;
    const double share = scale / static_cast<double>(ex.ids.size());
    for (auto id : ex.ids) {
      auto g = grad->input.row(id);
      for (std::size_t i = 0; i < d; ++i) g[i] += share * dh[i];
    }
  }
  return loss * scale;
}

// Per-example SGD in a seeded shuffled order each epoch.
inline FastTextModel train_fasttext_supervised(const Dataset& train, const FastTextConfig& cfg,
                                               std::vector<double>* epoch_loss = nullptr) {
  FastTextModel m = make_fasttext(train.sentences(), cfg);
  const auto data = fasttext_encode(m, train.sentences());
  Rng rng(cfg.seed ^ 0x9E3779B97F4A7C15ull);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double schedule = static_cast<double>(data.size() * cfg.epochs);
  double processed = 0.0;
  const std::size_t d = cfg.dim;
  std::vector<double> dh(d);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double loss = 0.0;
    for (auto idx : order) {
      const double lr = cfg.learning_rate * std::max(0.0, 1.0 - processed / schedule);
      processed += 1.0;
      const auto& ex = data[idx];
      const auto h = detail::fasttext_hidden(m, ex.ids);
      auto p = detail::fasttext_posterior(m, h);
      const std::size_t y = index_of(ex.y);
      loss += cce_loss(p, ex.y);
      p[y] -= 1.0;
      std::fill(dh.begin(), dh.end(), 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        auto w = m.output.row(i);
        for (std::size_t k = 0; k < kNumLabels; ++k) {
          dh[i] += w[k] * p[k];
          w[k] -= lr * h[i] * p[k];
        }
      }
      for (std::size_t k = 0; k < kNumLabels; ++k) m.bias[k] -= lr * p[k];
      if (ex.ids.empty()) continue;
      const double share = lr / static_cast<double>(ex.ids.size());
      for (auto id : ex.ids) {
        auto row = m.input.row(id);
        for (std::size_t i = 0; i < d; ++i) row[i] -= share * dh[i];
      }
    }
    if (epoch_loss) epoch_loss->push_back(data.empty() ? 0.0 : loss / static_cast<double>(data.size()));
  }
  return m;
}

}  // namespace nordiclid
