#pragma once

// Model parameter flattening, tiny random models and toy corpora shared by the
// unit tests and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nordiclid/embeddings.hpp"
#include "nordiclid/neural.hpp"
#include "nordiclid/reduce.hpp"
#include "test_support.hpp"

namespace nordiclid::testing {

inline std::vector<double> flatten(const MlpModel& m) {
  std::vector<double> out;
  for (std::size_t l = 0; l < m.num_layers(); ++l) {
    out.insert(out.end(), m.weights[l].values().begin(), m.weights[l].values().end());
    out.insert(out.end(), m.biases[l].begin(), m.biases[l].end());
  }
  return out;
}

inline void unflatten(MlpModel& m, const std::vector<double>& p) {
  std::size_t at = 0;
  for (std::size_t l = 0; l < m.num_layers(); ++l) {
    for (auto& v : m.weights[l].values()) v = p[at++];
    for (auto& v : m.biases[l]) v = p[at++];
  }
}

inline std::vector<double> flatten(CnnModel& m) {
  std::vector<double> out;
  for (auto span : cnn_parameters(m)) out.insert(out.end(), span.begin(), span.end());
  return out;
}

inline void unflatten(CnnModel& m, const std::vector<double>& p) {
  std::size_t at = 0;
  for (auto span : cnn_parameters(m)) {
    for (auto& v : span) v = p[at++];
  }
}

inline std::vector<double> flatten(const FastTextModel& m) {
  std::vector<double> p(m.input.values());
  p.insert(p.end(), m.output.values().begin(), m.output.values().end());
  p.insert(p.end(), m.bias.begin(), m.bias.end());
  return p;
}

inline void unflatten(FastTextModel& m, const std::vector<double>& p) {
  std::size_t at = 0;
  for (auto& v : m.input.values()) v = p[at++];
  for (auto& v : m.output.values()) v = p[at++];
  for (auto& v : m.bias) v = p[at++];
}

inline DenseData random_data(std::mt19937_64& gen, std::size_t n, std::size_t d) {
  std::normal_distribution<double> normal;
  DenseData x(n, std::vector<double>(d));
  for (auto& row : x) {
    for (auto& v : row) v = normal(gen);
  }
  return x;
}

inline CnnConfig tiny_cnn_config() {
  CnnConfig c;
  c.gram_order = 1;
  c.embed_dim = 3;
  c.filters = 2;
  c.kernel = 2;
  c.seq_len = 6;
  return c;
}

inline CnnModel random_tiny_cnn(std::uint64_t seed) {
  // V = 5: pad, unknown and three vocabulary tokens.
  auto m = init_cnn(tiny_cnn_config(), TokenIndex({"a", "b", "c"}), seed);
  Rng rng(seed + 1000);
  for (auto span : cnn_parameters(m)) {
    for (auto& v : span) v = rng.uniform(-1.0, 1.0);
  }
  for (auto& v : m.embedding.row(kPadToken)) v = 0.0;
  return m;
}

// True when a finite-difference step of about 1e-4 could cross a ReLU kink or
// switch a max-pool winner; the difference quotient is then not a derivative.
inline bool cnn_near_kink(const CnnModel& m, const std::vector<SequenceExample>& data) {
  for (const auto& e : data) {
    const auto t = cnn_trace(m, e.tokens);
    for (std::size_t f = 0; f < t.pooled.size(); ++f) {
      for (std::size_t p = 0; p < t.conv.rows(); ++p) {
        const double v = t.conv(p, f);
        if (std::fabs(v) < 1e-4) return true;
        if (p != t.argmax[f] && std::fabs(std::max(0.0, v) - t.pooled[f]) < 1e-4 && t.pooled[f] > 0) return true;
      }
    }
  }
  return false;
}

// Class signal carried only by character order: dk sentences look like
// a..ab..b and sv sentences like b..ba..a.
inline Dataset adjacency_corpus(std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sentence> out;
  for (std::size_t i = 0; i < per_class; ++i) {
    const std::size_t x = 1 + rng.uniform_index(8), y = 1 + rng.uniform_index(8);
    out.push_back(sentence(Label::kDk, std::string(x, 'a') + std::string(y, 'b')));
    const std::size_t u = 1 + rng.uniform_index(8), v = 1 + rng.uniform_index(8);
    out.push_back(sentence(Label::kSv, std::string(u, 'b') + std::string(v, 'a')));
  }
  return Dataset(std::move(out), seed);
}

}  // namespace nordiclid::testing
