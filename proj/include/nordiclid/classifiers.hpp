#pragma once

// Classical classifiers over sparse feature vectors: k nearest neighbours,
// multinomial logistic regression, multinomial naive Bayes and one-vs-rest
// linear SVM.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "nordiclid/error.hpp"
#include "nordiclid/features.hpp"
#include "nordiclid/label.hpp"
#include "nordiclid/math.hpp"
#include "nordiclid/rng.hpp"

namespace nordiclid {

namespace detail {

inline std::size_t common_dim(std::span<const Example> data) {
  if (data.empty()) throw InvalidArgument("training set is empty");
  const std::size_t dim = data.front().x.dim;
  for (const auto& e : data) {
    if (e.x.dim != dim) throw DimensionMismatch(dim, e.x.dim);
  }
  return dim;
}

inline void check_dim(std::size_t expected, const FeatureVector& x) {
  if (x.dim != expected) throw DimensionMismatch(expected, x.dim);
}

// Scores w_k . x + b_k for weights laid out as kNumLabels x (dim + 1).
inline std::vector<double> affine_scores(const Matrix& w, const FeatureVector& x) {
  const std::size_t bias = w.cols() - 1;
  std::vector<double> scores(kNumLabels);
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    const auto row = w.row(k);
    scores[k] = dot(x, row) + row[bias];
  }
  return scores;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// k nearest neighbours

struct KnnModel {
  std::size_t k = 3;
  std::size_t dim = 0;
  std::vector<Example> points;
};

inline KnnModel train_knn(std::span<const Example> data, std::size_t k = 3) {
  const std::size_t dim = detail::common_dim(data);
  if (k < 1 || k > data.size()) {
    throw InvalidArgument("k must lie in [1, " + std::to_string(data.size()) + "], got " +
                          std::to_string(k));
  }
  return KnnModel{k, dim, std::vector<Example>(data.begin(), data.end())};
}

// Majority vote among the k nearest points by Euclidean distance. Distance ties
// go to the earlier training point; vote ties to the smaller summed distance,
// then to label order.
inline Label knn_predict(const KnnModel& model, const FeatureVector& x) {
  detail::check_dim(model.dim, x);
  if (model.k < 1 || model.k > model.points.size()) throw InvalidArgument("k exceeds training size");
  std::vector<std::pair<double, std::size_t>> dist(model.points.size());
  for (std::size_t i = 0; i < model.points.size(); ++i) {
    dist[i] = {squared_distance(x, model.points[i].x), i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(model.k), dist.end());
  PerLabel<std::size_t> votes{};
  PerLabel<double> summed{};
  for (std::size_t j = 0; j < model.k; ++j) {
    const auto l = index_of(model.points[dist[j].second].y);
    ++votes[l];
    summed[l] += std::sqrt(dist[j].first);
  }
  std::size_t best = 0;
  for (std::size_t l = 1; l < kNumLabels; ++l) {
    if (votes[l] > votes[best] || (votes[l] == votes[best] && votes[l] > 0 && summed[l] < summed[best])) {
      best = l;
    }
  }
  return label_at(best);
}

// ---------------------------------------------------------------------------
// Multinomial logistic regression

struct LogRegConfig {
  double learning_rate = 0.5;
  std::size_t epochs = 500;
};

struct LogRegModel {
  std::size_t dim = 0;
  Matrix weights;  // kNumLabels x (dim + 1), bias in the last column
};

inline LogRegModel make_logreg(std::size_t dim) {
  return LogRegModel{dim, Matrix(kNumLabels, dim + 1, 0.0)};
}

inline Prediction logreg_predict(const LogRegModel& model, const FeatureVector& x) {
  detail::check_dim(model.dim, x);
  auto posterior = softmax(detail::affine_scores(model.weights, x));
  return {argmax_label(posterior), std::move(posterior)};
}

// Mean cross-entropy over data. When gradient is non-null it receives the
// gradient with respect to the weights (same shape).
inline double logreg_objective(const LogRegModel& model, std::span<const Example> data,
                               Matrix* gradient = nullptr) {
  if (gradient) *gradient = Matrix(kNumLabels, model.dim + 1, 0.0);
  if (data.empty()) return 0.0;
  const double inv_n = 1.0 / static_cast<double>(data.size());
  double loss = 0.0;
  for (const auto& e : data) {
    detail::check_dim(model.dim, e.x);
    const auto p = softmax(detail::affine_scores(model.weights, e.x));
    loss += cce_loss(p, e.y);
    if (!gradient) continue;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      const double delta = (p[k] - (k == index_of(e.y) ? 1.0 : 0.0)) * inv_n;
      auto g = gradient->row(k);
      for (const auto& [i, v] : e.x.entries) g[i] += delta * v;
      g[model.dim] += delta;
    }
  }
  return loss * inv_n;
}

// Full-batch gradient descent on the mean cross-entropy from zero weights.
inline LogRegModel train_logreg(std::span<const Example> data, const LogRegConfig& cfg = {},
                                std::vector<double>* loss_history = nullptr) {
  auto model = make_logreg(detail::common_dim(data));
  Matrix grad;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double loss = logreg_objective(model, data, &grad);
    if (loss_history) loss_history->push_back(loss);
    auto& w = model.weights.values();
    const auto& g = grad.values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cfg.learning_rate * g[i];
  }
  return model;
}

// ---------------------------------------------------------------------------
// Multinomial naive Bayes

struct NbModel {
  std::size_t dim = 0;
  double alpha = 1.0;
  PerLabel<double> log_prior{};
  Matrix log_likelihood;  // kNumLabels x dim
};

// p(i | k) = (count(i, k) + alpha) / (total(k) + alpha * dim); priors are label
// frequencies.
inline NbModel train_nb(std::span<const Example> data, double alpha = 1.0) {
  if (alpha < 0.0 || !std::isfinite(alpha)) throw InvalidArgument("alpha must be non-negative");
  NbModel model;
  model.dim = detail::common_dim(data);
  model.alpha = alpha;
  Matrix counts(kNumLabels, model.dim, 0.0);
  PerLabel<double> label_count{};
  for (const auto& e : data) {
    const auto k = index_of(e.y);
    label_count[k] += 1.0;
    auto row = counts.row(k);
    for (const auto& [i, v] : e.x.entries) {
      if (v < 0.0) throw NegativeCount();
      row[i] += v;
    }
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(data.size());
  model.log_likelihood = Matrix(kNumLabels, model.dim, kNegInf);
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    model.log_prior[k] = label_count[k] > 0.0 ? std::log(label_count[k] / n) : kNegInf;
    const auto row = counts.row(k);
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    const double denom = total + alpha * static_cast<double>(model.dim);
    if (denom <= 0.0) continue;
    auto out = model.log_likelihood.row(k);
    for (std::size_t i = 0; i < model.dim; ++i) {
      const double num = row[i] + alpha;
      out[i] = num > 0.0 ? std::log(num / denom) : kNegInf;
    }
  }
  return model;
}

// Log-scores log p(C_k) + sum_i x_i log p(i | C_k). Zero counts contribute
// nothing, even against a -inf likelihood.
inline Prediction nb_predict(const NbModel& model, const FeatureVector& x) {
  detail::check_dim(model.dim, x);
  std::vector<double> scores(kNumLabels);
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    double s = model.log_prior[k];
    const auto ll = model.log_likelihood.row(k);
    for (const auto& [i, v] : x.entries) {
      if (v < 0.0) throw NegativeCount();
      if (v != 0.0) s += v * ll[i];
    }
    scores[k] = s;
  }
  return {argmax_label(scores), std::move(scores)};
}

// ---------------------------------------------------------------------------
// Linear SVM, one-vs-rest, primal Pegasos

struct SvmConfig {
  double lambda = 1e-4;
  std::size_t epochs = 20;
  std::uint64_t seed = 42;
};

struct SvmModel {
  std::size_t dim = 0;
  double lambda = 1e-4;
  Matrix weights;  // kNumLabels x (dim + 1); the bias is a regularized weight on a constant 1
};

inline std::vector<double> svm_scores(const SvmModel& model, const FeatureVector& x) {
  detail::check_dim(model.dim, x);
  return detail::affine_scores(model.weights, x);
}

inline Label svm_predict(const SvmModel& model, const FeatureVector& x) {
  return argmax_label(svm_scores(model, x));
}

// lambda/2 |w|^2 + mean hinge loss for the binary problem `positive` vs rest.
inline double svm_objective(const SvmModel& model, std::span<const Example> data, Label positive) {
  const auto w = model.weights.row(index_of(positive));
  double norm2 = 0.0;
  for (double v : w) norm2 += v * v;
  double hinge = 0.0;
  for (const auto& e : data) {
    const double y = e.y == positive ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - y * (dot(e.x, w) + w[model.dim]));
  }
  return 0.5 * model.lambda * norm2 + (data.empty() ? 0.0 : hinge / static_cast<double>(data.size()));
}

// Pegasos stochastic subgradient descent with step 1/(lambda t). Each epoch is
// one pass over a seeded permutation; all six binary problems see the same
// order. objective_history receives the per-label objective after every epoch.
inline SvmModel train_svm(std::span<const Example> data, const SvmConfig& cfg = {},
                          std::vector<PerLabel<double>>* objective_history = nullptr) {
  if (!(cfg.lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  SvmModel model;
  model.dim = detail::common_dim(data);
  model.lambda = cfg.lambda;
  model.weights = Matrix(kNumLabels, model.dim + 1, 0.0);
  const std::size_t bias = model.dim;

  // w_k = scale_k * v_k keeps the shrink step O(1) for sparse inputs.
  Matrix v(kNumLabels, model.dim + 1, 0.0);
  PerLabel<double> scale;
  scale.fill(1.0);

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t idx : order) {
      const auto& e = data[idx];
      ++t;
      const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
      for (std::size_t k = 0; k < kNumLabels; ++k) {
        auto vk = v.row(k);
        const double y = index_of(e.y) == k ? 1.0 : -1.0;
        const double margin = y * scale[k] * (dot(e.x, vk) + vk[bias]);
        scale[k] *= 1.0 - eta * cfg.lambda;
        if (scale[k] == 0.0) {
          std::fill(vk.begin(), vk.end(), 0.0);
          scale[k] = 1.0;
        }
        if (margin < 1.0) {
          const double step = eta * y / scale[k];
          for (const auto& [i, val] : e.x.entries) vk[i] += step * val;
          vk[bias] += step;
        }
        if (scale[k] < 1e-9) {
          for (auto& val : vk) val *= scale[k];
          scale[k] = 1.0;
        }
      }
    }
    if (objective_history || epoch + 1 == cfg.epochs) {
      for (std::size_t k = 0; k < kNumLabels; ++k) {
        auto w = model.weights.row(k);
        const auto vk = v.row(k);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = scale[k] * vk[i];
      }
    }
    if (objective_history) {
      PerLabel<double> objective{};
      for (Label l : kAllLabels) objective[index_of(l)] = svm_objective(model, data, l);
      objective_history->push_back(objective);
    }
  }
  return model;
}

}  // namespace nordiclid
