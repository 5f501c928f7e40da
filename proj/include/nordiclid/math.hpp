#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nordiclid/error.hpp"
#include "nordiclid/label.hpp"

namespace nordiclid {

// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline std::vector<double> relu(std::span<const double> z) {
  std::vector<double> out(z.begin(), z.end());
  for (auto& v : out) v = std::max(0.0, v);
  return out;
}

// Max-subtracted softmax.
inline std::vector<double> softmax(std::span<const double> z) {
  std::vector<double> out(z.begin(), z.end());
  if (out.empty()) return out;
  const double m = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (auto& v : out) {
    v = std::exp(v - m);
    sum += v;
  }
  for (auto& v : out) v /= sum;
  return out;
}

inline constexpr double kProbabilityFloor = 1e-12;

// Categorical cross-entropy for a single prediction.
inline double cce_loss(std::span<const double> posterior, Label y) {
  return -std::log(std::max(posterior[index_of(y)], kProbabilityFloor));
}

// Mean categorical cross-entropy over a batch.
inline double cce_loss(std::span<const std::vector<double>> posteriors, std::span<const Label> ys) {
  if (posteriors.size() != ys.size()) throw LengthMismatch(posteriors.size(), ys.size());
  if (posteriors.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) total += cce_loss(posteriors[i], ys[i]);
  return total / static_cast<double>(ys.size());
}

inline double mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw LengthMismatch(pred.size(), target.size());
  if (pred.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.size());
}

// Index of the maximum; the first index wins ties. NaN entries never win.
inline std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best] || (std::isnan(v[best]) && !std::isnan(v[i]))) best = i;
  }
  return best;
}

inline Label argmax_label(std::span<const double> scores) { return label_at(argmax(scores)); }

// A predicted label with the per-label scores it was chosen from (posterior
// probabilities or log-scores depending on the model).
struct Prediction {
  Label label = Label::kDk;
  std::vector<double> scores;
};

// 17 significant digits, enough for an exact round trip.
inline std::string format_double(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace nordiclid
