#pragma once

// Multilayer perceptron and 1-D convolutional text classifier with explicit
// forward and backward passes, trained by mini-batch SGD on cross-entropy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "nordiclid/corpus.hpp"
#include "nordiclid/error.hpp"
#include "nordiclid/features.hpp"
#include "nordiclid/label.hpp"
#include "nordiclid/math.hpp"
#include "nordiclid/rng.hpp"

namespace nordiclid {

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  std::uint64_t seed = 42;
};

struct TrainHistory {
  std::vector<double> train_loss;     // mean cross-entropy per epoch, measured after the epoch
  std::vector<double> test_accuracy;  // empty when no test set was given
};

namespace detail {

inline void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || cfg.batch_size == 0) {
    throw InvalidArgument("learning rate and batch size must be positive");
  }
}

inline void xavier_fill(std::span<double> values, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : values) v = rng.uniform(-limit, limit);
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Multilayer perceptron

struct MlpModel {
  std::vector<std::size_t> sizes;               // [d_in, hidden..., kNumLabels]
  std::vector<Matrix> weights;                  // layer l is sizes[l] x sizes[l + 1]
  std::vector<std::vector<double>> biases;      // layer l has sizes[l + 1] entries

  std::size_t input_dim() const { return sizes.front(); }
  std::size_t num_layers() const { return weights.size(); }
};

// All-zero parameters with the given layer sizes.
inline MlpModel make_mlp(std::vector<std::size_t> sizes) {
  if (sizes.size() < 3) throw InvalidArgument("an MLP needs input, at least one hidden and an output layer");
  if (sizes.back() != kNumLabels) throw InvalidArgument("the output layer must have one unit per label");
  for (std::size_t s : sizes) {
    if (s == 0) throw InvalidArgument("layer sizes must be positive");
  }
  MlpModel m;
  m.sizes = std::move(sizes);
  for (std::size_t l = 0; l + 1 < m.sizes.size(); ++l) {
    m.weights.emplace_back(m.sizes[l], m.sizes[l + 1], 0.0);
    m.biases.emplace_back(m.sizes[l + 1], 0.0);
  }
  return m;
}

// Xavier-uniform weights, zero biases.
inline MlpModel init_mlp(std::vector<std::size_t> sizes, std::uint64_t seed) {
  auto m = make_mlp(std::move(sizes));
  Rng rng(seed);
  for (auto& w : m.weights) detail::xavier_fill(w.values(), w.rows(), w.cols(), rng);
  return m;
}

namespace detail {

struct MlpActivations {
  std::vector<std::vector<double>> pre;   // z for layers 1..L
  std::vector<std::vector<double>> post;  // relu(z) for hidden layers, softmax for the last
};

inline MlpActivations mlp_run(const MlpModel& m, const FeatureVector& x) {
  if (x.dim != m.input_dim()) throw DimensionMismatch(m.input_dim(), x.dim);
  MlpActivations a;
  const std::size_t layers = m.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    std::vector<double> z = m.biases[l];
    if (l == 0) {
      for (const auto& [i, v] : x.entries) axpy(v, m.weights[0].row(i), z);
    } else {
      const auto& in = a.post.back();
      for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] != 0.0) axpy(in[i], m.weights[l].row(i), z);
      }
    }
    a.post.push_back(l + 1 == layers ? softmax(z) : relu(z));
    a.pre.push_back(std::move(z));
  }
  return a;
}

// Adds the gradient of scale * CE(x, y) into grad. touched_rows, when given,
// collects first-layer rows that received a contribution.
inline double mlp_accumulate(const MlpModel& m, const Example& e, double scale, MlpModel& grad,
                             std::vector<std::uint32_t>* touched_rows = nullptr) {
  const auto a = mlp_run(m, e.x);
  const std::size_t layers = m.num_layers();
  std::vector<double> delta = a.post.back();
  delta[index_of(e.y)] -= 1.0;
  for (auto& d : delta) d *= scale;
  for (std::size_t l = layers; l-- > 0;) {
    detail::axpy(1.0, delta, grad.biases[l]);
    if (l == 0) {
      for (const auto& [i, v] : e.x.entries) {
        axpy(v, delta, grad.weights[0].row(i));
        if (touched_rows) touched_rows->push_back(i);
      }
      break;
    }
    const auto& in = a.post[l - 1];
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (in[i] != 0.0) axpy(in[i], delta, grad.weights[l].row(i));
    }
    std::vector<double> next(m.sizes[l], 0.0);
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (a.pre[l - 1][i] <= 0.0) continue;
      const auto w = m.weights[l].row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < delta.size(); ++j) s += w[j] * delta[j];
      next[i] = s;
    }
    delta = std::move(next);
  }
  return cce_loss(a.post.back(), e.y);
}

}  // namespace detail

inline std::vector<double> mlp_forward(const MlpModel& m, const FeatureVector& x) {
  return detail::mlp_run(m, x).post.back();
}

inline Prediction mlp_predict(const MlpModel& m, const FeatureVector& x) {
  auto p = mlp_forward(m, x);
  return {argmax_label(p), std::move(p)};
}

// Mean cross-entropy over data; gradient (if requested) has the model's shape.
inline double mlp_objective(const MlpModel& m, std::span<const Example> data, MlpModel* gradient = nullptr) {
  MlpModel scratch;
  MlpModel& grad = gradient ? *gradient : scratch;
  grad = make_mlp(m.sizes);
  if (data.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(data.size());
  double loss = 0.0;
  for (const auto& e : data) {
    if (gradient) {
      loss += detail::mlp_accumulate(m, e, scale, grad);
    } else {
      loss += cce_loss(mlp_forward(m, e.x), e.y);
    }
  }
  return loss * scale;
}

template <class Model, class Data, class Predict>
double accuracy_of(const Model& m, std::span<const Data> data, Predict&& predict) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& e : data) correct += predict(m, e) == e.y ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

// Mini-batch SGD from Xavier initialisation. `hidden` lists the hidden layer
// widths; the input width comes from the data.
inline MlpModel mlp_train(std::span<const Example> train, std::span<const Example> test,
                          const std::vector<std::size_t>& hidden, const TrainConfig& cfg,
                          TrainHistory* history = nullptr) {
  detail::validate(cfg);
  if (train.empty()) throw InvalidArgument("training set is empty");
  std::vector<std::size_t> sizes = {train.front().x.dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(kNumLabels);
  for (const auto& e : train) {
    if (e.x.dim != sizes[0]) throw DimensionMismatch(sizes[0], e.x.dim);
  }
  auto model = init_mlp(sizes, cfg.seed);
  auto grad = make_mlp(sizes);
  Rng rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::uint32_t> touched;
  auto predict = [](const MlpModel& m, const Example& e) { return mlp_predict(m, e.x).label; };
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      touched.clear();
      for (std::size_t b = start; b < end; ++b) {
        detail::mlp_accumulate(model, train[order[b]], scale, grad, &touched);
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      for (std::uint32_t r : touched) {
        auto g = grad.weights[0].row(r);
        detail::axpy(-cfg.learning_rate, g, model.weights[0].row(r));
        std::fill(g.begin(), g.end(), 0.0);
      }
      for (std::size_t l = 0; l < model.num_layers(); ++l) {
        if (l > 0) {
          detail::axpy(-cfg.learning_rate, grad.weights[l].values(), model.weights[l].values());
          grad.weights[l].fill(0.0);
        }
        detail::axpy(-cfg.learning_rate, grad.biases[l], model.biases[l]);
        std::fill(grad.biases[l].begin(), grad.biases[l].end(), 0.0);
      }
    }
    if (history) {
      history->train_loss.push_back(mlp_objective(model, train));
      if (!test.empty()) history->test_accuracy.push_back(accuracy_of(model, test, predict));
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// Convolutional text classifier

struct CnnConfig {
  std::size_t gram_order = 2;  // tokens are character n-grams of this order
  std::size_t embed_dim = 16;
  std::size_t filters = 64;
  std::size_t kernel = 3;
  std::size_t seq_len = 128;   // pad or truncate to this many tokens
};

inline constexpr std::uint32_t kPadToken = 0;
inline constexpr std::uint32_t kUnknownToken = 1;
inline constexpr std::uint32_t kFirstVocabToken = 2;

struct CnnModel {
  CnnConfig config;
  TokenIndex vocabulary;        // model token id = vocabulary index + kFirstVocabToken
  Matrix embedding;             // V x embed_dim; the pad row stays zero
  Matrix conv;                  // filters x (kernel * embed_dim)
  std::vector<double> conv_bias;
  Matrix dense;                 // filters x kNumLabels
  std::vector<double> dense_bias;

  std::size_t vocab_size() const { return embedding.rows(); }
};

struct SequenceExample {
  std::vector<std::uint32_t> tokens;
  Label y = Label::kDk;
};

inline void validate(const CnnConfig& c) {
  if (c.gram_order < 1 || c.embed_dim < 1 || c.filters < 1 || c.kernel < 1 || c.seq_len < 1) {
    throw InvalidArgument("CNN dimensions must be positive");
  }
  if (c.kernel > c.seq_len) throw InvalidArgument("kernel size exceeds sequence length");
}

// All-zero parameters.
inline CnnModel make_cnn(const CnnConfig& cfg, TokenIndex vocabulary) {
  validate(cfg);
  CnnModel m;
  m.config = cfg;
  m.vocabulary = std::move(vocabulary);
  const std::size_t v = m.vocabulary.size() + kFirstVocabToken;
  m.embedding = Matrix(v, cfg.embed_dim, 0.0);
  m.conv = Matrix(cfg.filters, cfg.kernel * cfg.embed_dim, 0.0);
  m.conv_bias.assign(cfg.filters, 0.0);
  m.dense = Matrix(cfg.filters, kNumLabels, 0.0);
  m.dense_bias.assign(kNumLabels, 0.0);
  return m;
}

inline CnnModel init_cnn(const CnnConfig& cfg, TokenIndex vocabulary, std::uint64_t seed) {
  auto m = make_cnn(cfg, std::move(vocabulary));
  Rng rng(seed);
  for (std::size_t r = kPadToken + 1; r < m.embedding.rows(); ++r) {
    for (auto& v : m.embedding.row(r)) v = rng.uniform(-0.05, 0.05);
  }
  detail::xavier_fill(m.conv.values(), cfg.kernel * cfg.embed_dim, cfg.filters, rng);
  detail::xavier_fill(m.dense.values(), cfg.filters, kNumLabels, rng);
  return m;
}

// Character n-gram token ids, truncated to seq_len. Unknown n-grams map to the
// unknown id; non-empty text shorter than the gram order becomes a single
// unknown token.
inline std::vector<std::uint32_t> cnn_encode(const CnnModel& m, std::string_view text) {
  std::vector<std::uint32_t> ids;
  for (const auto& g : extract_char_ngrams(text, m.config.gram_order)) {
    if (ids.size() == m.config.seq_len) break;
    const auto i = m.vocabulary.find(g);
    ids.push_back(i ? *i + kFirstVocabToken : kUnknownToken);
  }
  if (ids.empty() && !text.empty()) ids.push_back(kUnknownToken);
  return ids;
}

struct CnnTrace {
  Matrix conv;                      // (seq_len - kernel + 1) x filters, before ReLU
  std::vector<double> pooled;       // max over positions of ReLU(conv)
  std::vector<std::size_t> argmax;  // first position attaining the max
  std::vector<double> posterior;
};

inline CnnTrace cnn_trace(const CnnModel& m, std::span<const std::uint32_t> tokens) {
  if (tokens.empty()) throw SequenceTooShort();
  const auto& c = m.config;
  const std::size_t n = std::min(tokens.size(), c.seq_len);
  for (std::size_t i = 0; i < n; ++i) {
    if (tokens[i] >= m.vocab_size()) throw DimensionMismatch(m.vocab_size(), tokens[i] + 1);
  }
  const std::size_t positions = c.seq_len - c.kernel + 1;
  CnnTrace t;
  t.conv = Matrix(positions, c.filters, 0.0);
  for (std::size_t p = 0; p < positions; ++p) {
    auto out = t.conv.row(p);
    std::copy(m.conv_bias.begin(), m.conv_bias.end(), out.begin());
    if (p >= n) continue;  // window lies entirely in padding
    for (std::size_t j = 0; j < c.kernel && p + j < n; ++j) {
      const auto emb = m.embedding.row(tokens[p + j]);
      for (std::size_t f = 0; f < c.filters; ++f) {
        const auto w = m.conv.row(f).subspan(j * c.embed_dim, c.embed_dim);
        double s = 0.0;
        for (std::size_t d = 0; d < c.embed_dim; ++d) s += w[d] * emb[d];
        out[f] += s;
      }
    }
  }
  t.pooled.assign(c.filters, 0.0);
  t.argmax.assign(c.filters, 0);
  for (std::size_t f = 0; f < c.filters; ++f) {
    double best = std::max(0.0, t.conv(0, f));
    for (std::size_t p = 1; p < positions; ++p) {
      const double v = std::max(0.0, t.conv(p, f));
      if (v > best) {
        best = v;
        t.argmax[f] = p;
      }
    }
    t.pooled[f] = best;
  }
  std::vector<double> logits = m.dense_bias;
  for (std::size_t f = 0; f < c.filters; ++f) detail::axpy(t.pooled[f], m.dense.row(f), logits);
  t.posterior = softmax(logits);
  return t;
}

inline std::vector<double> cnn_forward(const CnnModel& m, std::span<const std::uint32_t> tokens) {
  return cnn_trace(m, tokens).posterior;
}

inline Prediction cnn_predict(const CnnModel& m, std::string_view text) {
  const auto tokens = cnn_encode(m, text);
  auto p = cnn_forward(m, tokens);
  return {argmax_label(p), std::move(p)};
}

namespace detail {

// Adds the gradient of scale * CE into grad (same shape as m). The pad
// embedding row is constant and receives no gradient.
inline double cnn_accumulate(const CnnModel& m, const SequenceExample& e, double scale, CnnModel& grad) {
  const auto t = cnn_trace(m, e.tokens);
  const auto& c = m.config;
  const std::size_t n = std::min(e.tokens.size(), c.seq_len);
  std::vector<double> dlogits = t.posterior;
  dlogits[index_of(e.y)] -= 1.0;
  for (auto& d : dlogits) d *= scale;
  axpy(1.0, dlogits, grad.dense_bias);
  for (std::size_t f = 0; f < c.filters; ++f) {
    auto gd = grad.dense.row(f);
    const auto w = m.dense.row(f);
    double dpool = 0.0;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      gd[k] += t.pooled[f] * dlogits[k];
      dpool += w[k] * dlogits[k];
    }
    const std::size_t p = t.argmax[f];
    if (t.conv(p, f) <= 0.0) continue;  // ReLU inactive at the pooled position
    grad.conv_bias[f] += dpool;
    auto gw = grad.conv.row(f);
    const auto cw = m.conv.row(f);
    for (std::size_t j = 0; j < c.kernel; ++j) {
      if (p + j >= n) break;
      const std::uint32_t tok = e.tokens[p + j];
      const auto emb = m.embedding.row(tok);
      auto gemb = grad.embedding.row(tok);
      for (std::size_t d = 0; d < c.embed_dim; ++d) {
        gw[j * c.embed_dim + d] += dpool * emb[d];
        if (tok != kPadToken) gemb[d] += dpool * cw[j * c.embed_dim + d];
      }
    }
  }
  return cce_loss(t.posterior, e.y);
}

inline void cnn_zero(CnnModel& g) {
  g.embedding.fill(0.0);
  g.conv.fill(0.0);
  std::fill(g.conv_bias.begin(), g.conv_bias.end(), 0.0);
  g.dense.fill(0.0);
  std::fill(g.dense_bias.begin(), g.dense_bias.end(), 0.0);
}

}  // namespace detail

inline double cnn_objective(const CnnModel& m, std::span<const SequenceExample> data,
                            CnnModel* gradient = nullptr) {
  CnnModel scratch = make_cnn(m.config, TokenIndex{});
  CnnModel& grad = gradient ? *gradient : scratch;
  grad = m;
  detail::cnn_zero(grad);
  if (data.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(data.size());
  double loss = 0.0;
  for (const auto& e : data) loss += detail::cnn_accumulate(m, e, scale, grad);
  return loss * scale;
}

// Flattened parameter views in a fixed order: embedding, conv, conv bias,
// dense, dense bias.
inline std::vector<std::span<double>> cnn_parameters(CnnModel& m) {
  return {m.embedding.values(), m.conv.values(), m.conv_bias, m.dense.values(), m.dense_bias};
}

inline std::vector<SequenceExample> cnn_encode_all(const CnnModel& m, const Dataset& d) {
  std::vector<SequenceExample> out;
  out.reserve(d.size());
  for (const auto& s : d) out.push_back({cnn_encode(m, s.text), s.label});
  return out;
}

// Trains on pre-encoded sequences starting from `model`.
inline CnnModel cnn_train_encoded(CnnModel model, std::span<const SequenceExample> train,
                                  std::span<const SequenceExample> test, const TrainConfig& cfg,
                                  TrainHistory* history = nullptr) {
  detail::validate(cfg);
  if (train.empty()) throw InvalidArgument("training set is empty");
  CnnModel grad = model;
  detail::cnn_zero(grad);
  Rng rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto predict = [](const CnnModel& m, const SequenceExample& e) {
    return argmax_label(cnn_forward(m, e.tokens));
  };
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t b = start; b < end; ++b) detail::cnn_accumulate(model, train[order[b]], scale, grad);
      auto params = cnn_parameters(model);
      auto grads = cnn_parameters(grad);
      for (std::size_t i = 0; i < params.size(); ++i) detail::axpy(-cfg.learning_rate, grads[i], params[i]);
      detail::cnn_zero(grad);
    }
    if (history) {
      double loss = 0.0;
      for (const auto& e : train) loss += cce_loss(cnn_forward(model, e.tokens), e.y);
      history->train_loss.push_back(loss / static_cast<double>(train.size()));
      if (!test.empty()) history->test_accuracy.push_back(accuracy_of(model, test, predict));
    }
  }
  return model;
}

// Builds the token vocabulary from the training sentences and trains.
inline CnnModel cnn_train(const Dataset& train, const Dataset& test, const CnnConfig& cnn,
                          const TrainConfig& cfg, TrainHistory* history = nullptr) {
  validate(cnn);
  auto vocab = NgramVocabulary::build(train, cnn.gram_order);
  auto model = init_cnn(cnn, vocab.index(), cfg.seed);
  const auto train_seq = cnn_encode_all(model, train);
  const auto test_seq = cnn_encode_all(model, test);
  return cnn_train_encoded(std::move(model), train_seq, test_seq, cfg, history);
}

inline double cnn_accuracy(const CnnModel& m, const Dataset& d) {
  if (d.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& s : d) correct += cnn_predict(m, s.text).label == s.label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

// ---------------------------------------------------------------------------
// Kernel-size sweep

struct SweepEntry {
  std::size_t gram = 1;
  std::size_t kernel = 1;
  double accuracy = 0.0;
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // gram-major, kernels ascending within a gram
};

// One CNN per (gram order, kernel size), all with the same seed and settings.
inline SweepResult kernel_size_sweep(const Dataset& train, const Dataset& test,
                                     const std::vector<std::size_t>& grams,
                                     const std::vector<std::size_t>& kernels, const CnnConfig& base,
                                     const TrainConfig& cfg) {
  SweepResult result;
  for (std::size_t g : grams) {
    for (std::size_t h : kernels) {
      CnnConfig c = base;
      c.gram_order = g;
      c.kernel = h;
      const auto model = cnn_train(train, Dataset{}, c, cfg);
      result.entries.push_back({g, h, cnn_accuracy(model, test)});
    }
  }
  return result;
}

inline std::string format_sweep_csv(const SweepResult& r) {
  std::string out = "gram,kernel,accuracy\n";
  for (const auto& e : r.entries) {
    out += std::to_string(e.gram) + "," + std::to_string(e.kernel) + "," + format_double(e.accuracy) + "\n";
  }
  return out;
}

}  // namespace nordiclid
