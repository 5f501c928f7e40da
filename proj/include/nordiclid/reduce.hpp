#pragma once

// PCA by power iteration with deflation, and exact t-SNE.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "nordiclid/error.hpp"
#include "nordiclid/label.hpp"
#include "nordiclid/math.hpp"
#include "nordiclid/rng.hpp"

namespace nordiclid {

using DenseData = std::vector<std::vector<double>>;

namespace detail {

inline std::size_t check_points(const DenseData& data, std::size_t min_points) {
  if (data.size() < min_points) throw TooFewPoints(data.size(), min_points);
  const std::size_t d = data.front().size();
  for (const auto& x : data) {
    if (x.size() != d) throw DimensionMismatch(d, x.size());
  }
  return d;
}

inline double frobenius(const Matrix& m) {
  double s = 0.0;
  for (double v : m.values()) s += v * v;
  return std::sqrt(s);
}

inline double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline std::vector<double> multiply(const Matrix& a, std::span<const double> v) {
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += row[j] * v[j];
    out[i] = s;
  }
  return out;
}

}  // namespace detail

struct Covariance {
  Matrix k;
  std::vector<double> mean;
};

// Population covariance (divides by n).
inline Covariance covariance(const DenseData& data) {
  const std::size_t d = detail::check_points(data, 2);
  const double n = static_cast<double>(data.size());
  Covariance c{Matrix(d, d, 0.0), std::vector<double>(d, 0.0)};
  for (const auto& x : data) {
    for (std::size_t i = 0; i < d; ++i) c.mean[i] += x[i];
  }
  for (auto& m : c.mean) m /= n;
  std::vector<double> centered(d);
  for (const auto& x : data) {
    for (std::size_t i = 0; i < d; ++i) centered[i] = x[i] - c.mean[i];
    for (std::size_t i = 0; i < d; ++i) {
      if (centered[i] == 0.0) continue;
      auto row = c.k.row(i);
      for (std::size_t j = i; j < d; ++j) row[j] += centered[i] * centered[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      c.k(i, j) /= n;
      c.k(j, i) = c.k(i, j);
    }
  }
  return c;
}

struct EigenPair {
  double value;
  std::vector<double> vector;
};

struct PowerIterationConfig {
  double tolerance = 1e-10;
  std::size_t max_iterations = 10000;
  double residual_tolerance = 1e-6;  // relative to the Frobenius norm of K
};

// Largest-first eigenpairs of a symmetric matrix. The matrix is shifted to be
// positive semidefinite (Gershgorin bound) so the dominant eigenvalue is the
// algebraically largest; each found pair is deflated to zero.
inline std::vector<EigenPair> top_eigenpairs(const Matrix& k, std::size_t m,
                                             const PowerIterationConfig& cfg = {}) {
  const std::size_t d = k.rows();
  if (k.cols() != d) throw DimensionMismatch(d, k.cols());
  if (m < 1 || m > d) throw InvalidArgument("component count must be in [1, dim]");
  double lower = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d; ++i) {
    double radius = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (j != i) radius += std::abs(k(i, j));
    }
    lower = std::min(lower, k(i, i) - radius);
  }
  const double shift = std::max(0.0, -lower);
  Matrix a = k;
  for (std::size_t i = 0; i < d; ++i) a(i, i) += shift;
  const double k_norm = detail::frobenius(k);
  const double a_norm = detail::frobenius(a);

  Rng rng(0x5eed);
  std::vector<EigenPair> out;
  for (std::size_t c = 0; c < m; ++c) {
    std::vector<double> v(d);
    for (auto& x : v) x = rng.normal();
    // Gram-Schmidt against found vectors, applied twice for stability.
    auto orthogonalise = [&](std::vector<double>& x) {
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& p : out) {
          double proj = 0.0;
          for (std::size_t i = 0; i < d; ++i) proj += x[i] * p.vector[i];
          for (std::size_t i = 0; i < d; ++i) x[i] -= proj * p.vector[i];
        }
      }
      const double n = detail::norm(x);
      if (n > 0.0) {
        for (auto& xi : x) xi /= n;
      }
      return n;
    };
    orthogonalise(v);
    const double negligible = 1e-13 * std::max(a_norm, std::numeric_limits<double>::min());
    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
      auto w = detail::multiply(a, v);
      // Remaining spectrum is numerically zero: any orthogonal v is an eigenvector.
      if (orthogonalise(w) <= negligible) break;
      double delta = 0.0;
      for (std::size_t i = 0; i < d; ++i) delta += (w[i] - v[i]) * (w[i] - v[i]);
      v = std::move(w);
      if (std::sqrt(delta) < cfg.tolerance) break;
    }
    const auto kv = detail::multiply(k, v);
    double lambda = 0.0;
    for (std::size_t i = 0; i < d; ++i) lambda += v[i] * kv[i];
    double residual = 0.0;
    for (std::size_t i = 0; i < d; ++i) residual += (kv[i] - lambda * v[i]) * (kv[i] - lambda * v[i]);
    residual = std::sqrt(residual);
    if (residual > cfg.residual_tolerance * k_norm) throw ConvergenceFailure(c, residual);

    std::size_t big = 0;
    for (std::size_t i = 1; i < d; ++i) {
      if (std::abs(v[i]) > std::abs(v[big])) big = i;
    }
    if (v[big] < 0.0) {
      for (auto& x : v) x = -x;
    }
    const double mu = lambda + shift;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) a(i, j) -= mu * v[i] * v[j];
    }
    out.push_back({lambda, std::move(v)});
  }
  return out;
}

struct PcaResult {
  std::vector<EigenPair> components;
  std::vector<double> mean;
  Matrix coords;  // n x m
};

inline PcaResult pca(const DenseData& data, std::size_t m = 2, const PowerIterationConfig& cfg = {}) {
  auto cov = covariance(data);
  PcaResult r{top_eigenpairs(cov.k, m, cfg), std::move(cov.mean), Matrix(data.size(), m, 0.0)};
  for (std::size_t p = 0; p < data.size(); ++p) {
    for (std::size_t c = 0; c < m; ++c) {
      double s = 0.0;
      const auto& v = r.components[c].vector;
      for (std::size_t i = 0; i < v.size(); ++i) s += (data[p][i] - r.mean[i]) * v[i];
      r.coords(p, c) = s;
    }
  }
  return r;
}

inline Matrix pca_project(const DenseData& data, std::size_t m = 2) { return pca(data, m).coords; }

// --- t-SNE -----------------------------------------------------------------

struct Affinities {
  Matrix conditional;  // row i holds p_{j|i}
  Matrix p;            // symmetrised joint probabilities
  std::vector<double> sigma;
  std::vector<double> perplexity;  // achieved per row
};

namespace detail {

inline Matrix squared_distances(const DenseData& data) {
  const std::size_t n = data.size();
  Matrix d(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < data[i].size(); ++k) {
        const double diff = data[i][k] - data[j][k];
        s += diff * diff;
      }
      d(i, j) = d(j, i) = s;
    }
  }
  return d;
}

// Fills row with p_{j|i} for precision beta and returns the entropy in bits.
inline double conditional_row(std::span<const double> dist, std::size_t i, double beta,
                              std::span<double> row) {
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (j != i) dmin = std::min(dmin, dist[j]);
  }
  double z = 0.0;
  double weighted = 0.0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (j == i) {
      row[j] = 0.0;
      continue;
    }
    const double shifted = dist[j] - dmin;
    row[j] = std::exp(-beta * shifted);
    z += row[j];
    weighted += row[j] * shifted;
  }
  for (auto& v : row) v /= z;
  const double nats = std::log(z) + beta * weighted / z;
  return nats / std::log(2.0);
}

}  // namespace detail

struct AffinityConfig {
  double tolerance = 1e-5;
  std::size_t bisection_steps = 50;
};

inline Affinities tsne_affinities(const DenseData& data, double perplexity, const AffinityConfig& cfg = {}) {
  detail::check_points(data, 4);
  const std::size_t n = data.size();
  if (!(perplexity >= 1.0) || perplexity >= static_cast<double>(n)) {
    throw PerplexityInfeasible(perplexity, n);
  }
  const auto dist = detail::squared_distances(data);
  const double target = std::log2(perplexity);
  Affinities a{Matrix(n, n, 0.0), Matrix(n, n, 0.0), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    auto row = a.conditional.row(i);
    const auto drow = dist.row(i);
    auto entropy = [&](double log_beta) { return detail::conditional_row(drow, i, std::exp(log_beta), row); };
    // Entropy decreases with beta: bracket the target in log-beta, then bisect.
    double lo = 0.0, hi = 0.0;
    const bool too_flat = entropy(0.0) > target;
    for (int step = 0; step < 700; ++step) {
      if (too_flat) {
        lo = hi;
        hi += 1.0;
        if (entropy(hi) <= target) break;
      } else {
        hi = lo;
        lo -= 1.0;
        if (entropy(lo) >= target) break;
      }
    }
    double h = 0.0;
    double log_beta = 0.0;
    for (std::size_t step = 0; step < cfg.bisection_steps; ++step) {
      log_beta = 0.5 * (lo + hi);
      h = entropy(log_beta);
      if (std::abs(std::exp2(h) - perplexity) < cfg.tolerance) break;
      (h > target ? lo : hi) = log_beta;
    }
    a.perplexity[i] = std::exp2(h);
    if (!(std::abs(a.perplexity[i] - perplexity) < cfg.tolerance)) throw PerplexityInfeasible(perplexity, n);
    a.sigma[i] = std::sqrt(1.0 / (2.0 * std::exp(log_beta)));
  }
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      a.p(i, j) = a.p(j, i) = (a.conditional(i, j) + a.conditional(j, i)) * scale;
    }
  }
  return a;
}

struct TsneConfig {
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  double exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;  // momentum also switches here
  double gradient_clamp = 1e6;
  double init_stddev = 1e-4;
  std::uint64_t seed = 42;
};

struct TsneResult {
  Matrix y;                   // n x 2
  std::vector<double> kl;     // KL(P||Q) before each update
  std::vector<double> q_sum;  // sum of Q before each update
  std::size_t clamped = 0;    // updates whose gradient norm hit the clamp
};

namespace detail {

// Student-t numerators; returns their sum over i != j.
inline double student_t(const Matrix& y, Matrix& num) {
  const std::size_t n = y.rows();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = y(i, 0) - y(j, 0);
      const double dy = y(i, 1) - y(j, 1);
      const double v = 1.0 / (1.0 + dx * dx + dy * dy);
      num(i, j) = num(j, i) = v;
      total += 2.0 * v;
    }
  }
  return total;
}

}  // namespace detail

inline double tsne_kl(const Matrix& p, const Matrix& y) {
  Matrix num(y.rows(), y.rows(), 0.0);
  const double z = detail::student_t(y, num);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t j = 0; j < p.cols(); ++j) {
      const double pij = p(i, j);
      if (pij > 0.0) kl += pij * std::log(pij / (num(i, j) / z));
    }
  }
  return kl;
}

inline TsneResult tsne_optimize(const Matrix& p, const TsneConfig& cfg = {}) {
  const std::size_t n = p.rows();
  if (p.cols() != n) throw DimensionMismatch(n, p.cols());
  if (n < 2) throw TooFewPoints(n);
  TsneResult r{Matrix(n, 2, 0.0), {}, {}, 0};
  Rng rng(cfg.seed);
  for (auto& v : r.y.values()) v = cfg.init_stddev * rng.normal();
  Matrix num(n, n, 0.0);
  Matrix velocity(n, 2, 0.0);
  std::vector<double> grad(n * 2);
  r.kl.reserve(cfg.iterations);
  r.q_sum.reserve(cfg.iterations);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const bool early = it < cfg.exaggeration_iterations;
    const double alpha = early ? cfg.exaggeration : 1.0;
    const double momentum = early ? cfg.initial_momentum : cfg.final_momentum;
    const double z = detail::student_t(r.y, num);
    double kl = 0.0;
    double qsum = 0.0;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double q = num(i, j) / z;
        const double pij = p(i, j);
        qsum += q;
        if (pij > 0.0) kl += pij * std::log(pij / q);
        const double coeff = 4.0 * (alpha * pij - q) * num(i, j);
        grad[2 * i] += coeff * (r.y(i, 0) - r.y(j, 0));
        grad[2 * i + 1] += coeff * (r.y(i, 1) - r.y(j, 1));
      }
    }
    r.kl.push_back(kl);
    r.q_sum.push_back(qsum);
    const double gnorm = detail::norm(grad);
    if (gnorm > cfg.gradient_clamp) {
      for (auto& g : grad) g *= cfg.gradient_clamp / gnorm;
      ++r.clamped;
    }
    auto& vel = velocity.values();
    auto& y = r.y.values();
    for (std::size_t k = 0; k < y.size(); ++k) {
      vel[k] = momentum * vel[k] - cfg.learning_rate * grad[k];
      y[k] += vel[k];
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) mx += r.y(i, 0), my += r.y(i, 1);
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) r.y(i, 0) -= mx, r.y(i, 1) -= my;
  }
  return r;
}

// --- output ----------------------------------------------------------------

struct ProjectedPoint {
  Label label;
  double x;
  double y;
};

using Projection2D = std::vector<ProjectedPoint>;

inline Projection2D make_projection(std::span<const Label> labels, const Matrix& coords) {
  if (labels.size() != coords.rows()) throw LengthMismatch(labels.size(), coords.rows());
  if (coords.cols() < 2) throw DimensionMismatch(2, coords.cols());
  Projection2D out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double x = coords(i, 0), y = coords(i, 1);
    if (!std::isfinite(x) || !std::isfinite(y)) throw NumericalError("non-finite projection coordinate");
    out.push_back({labels[i], x, y});
  }
  return out;
}

inline std::string format_projection(const Projection2D& points) {
  std::string out;
  for (const auto& p : points) {
    out += std::string(code_of(p.label)) + "\t" + format_double(p.x) + "\t" + format_double(p.y) + "\n";
  }
  return out;
}

}  // namespace nordiclid
