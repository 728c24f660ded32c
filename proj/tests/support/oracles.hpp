#pragma once

// Reference implementations used only by tests. Each one recomputes a
// quantity the slow, obvious way so the library path can be checked against
// it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "fdl/backbone.hpp"
#include "fdl/matrix.hpp"
#include "fdl/random.hpp"
#include "fdl/scatter.hpp"

namespace fdl::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(lo, hi);
  return m;
}

inline Matrix random_symmetric(std::size_t n, Rng& rng) {
  Matrix a = random_matrix(n, n, rng);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  }
  return s;
}

/// A Aᵀ + shift I for random A: symmetric positive definite.
inline Matrix random_spd(std::size_t n, Rng& rng, double shift = 1.0) {
  const Matrix a = random_matrix(n, n, rng);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < n; ++k) v += a(i, k) * a(j, k);
      s(i, j) = v;
    }
    s(i, i) += shift;
  }
  return s;
}

/// c_ij = Σ_k a_ik b_kj, one entry at a time.
inline Matrix brute_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) sum += a(i, k) * b(k, j);
      c(i, j) = sum;
    }
  }
  return c;
}

inline Matrix brute_transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

/// tr(Uᵀ S U) by forming the full product first.
inline double brute_trace_quadratic(const Matrix& u, const Matrix& s) {
  const Matrix full = brute_matmul(brute_matmul(brute_transpose(u), s), u);
  double t = 0.0;
  for (std::size_t i = 0; i < full.rows(); ++i) t += full(i, i);
  return t;
}

/// Σ_i (a_i - b_i)(a_i - b_i)ᵀ over columns where keep(i), then + mu I.
inline Matrix brute_difference_scatter(const Matrix& a, const Matrix& b,
                                       const std::function<bool(std::size_t)>& keep, double mu) {
  const std::size_t q = a.rows();
  Matrix s(q, q);
  for (std::size_t i = 0; i < a.cols(); ++i) {
    if (!keep(i)) continue;
    for (std::size_t r = 0; r < q; ++r) {
      for (std::size_t c = 0; c < q; ++c) {
        s(r, c) += (a(r, i) - b(r, i)) * (a(c, i) - b(c, i));
      }
    }
  }
  for (std::size_t r = 0; r < q; ++r) s(r, r) += mu;
  return s;
}

/// The literal quadruple sums over ordered sample pairs.
inline ScatterPair brute_classical_scatters(const Matrix& data, std::span<const int> labels) {
  const std::size_t d = data.rows();
  ScatterPair sp{Matrix(d, d), Matrix(d, d), 0.0, 0.0};
  for (std::size_t i = 0; i < data.cols(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      Matrix& target = labels[i] == labels[j] ? sp.s_w : sp.s_b;
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
          target(r, c) += (data(r, i) - data(r, j)) * (data(c, i) - data(c, j));
        }
      }
    }
  }
  return sp;
}

inline double relative_frobenius_error(const Matrix& a, const Matrix& b) {
  const double denom = std::max(b.frobenius_norm(), 1e-300);
  return (a - b).frobenius_norm() / denom;
}

/// Entry-wise relative error |a - n| / max(|a|, |n|, floor).
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

/// Central difference (f(x + h) - f(x - h)) / 2h for every entry of `values`,
/// restoring each entry afterwards.
inline std::vector<double> central_differences(std::span<double> values,
                                               const std::function<double()>& f,
                                               double h = 1e-5) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    const double plus = f();
    values[i] = saved - h;
    const double minus = f();
    values[i] = saved;
    out[i] = (plus - minus) / (2.0 * h);
  }
  return out;
}

/// Worst relative error of `analytic` against central differences of f.
/// Entries where both values are below the rounding resolution of the
/// difference quotient, about eps * |f| / h, are numerically zero and skipped:
/// an exactly-zero gradient would otherwise read as noise / floor.
inline double worst_gradient_error(std::span<double> values, std::span<const double> analytic,
                                   const std::function<double()>& f, double h = 1e-5) {
  const double resolution =
      1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f())) / h;
  const auto numeric = central_differences(values, f, h);
  double worst = 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    if (std::abs(analytic[i]) <= resolution && std::abs(numeric[i]) <= resolution) continue;
    worst = std::max(worst, relative_error(analytic[i], numeric[i]));
  }
  return worst;
}

/// Layer-by-layer forward pass written with explicit loops.
inline Matrix brute_forward_latent(const NetworkParams& params, const Matrix& inputs) {
  Matrix act = inputs;
  for (const DenseLayer& layer : params.layers) {
    Matrix next(layer.output_dim(), act.cols());
    for (std::size_t c = 0; c < act.cols(); ++c) {
      for (std::size_t r = 0; r < layer.output_dim(); ++r) {
        double z = layer.bias[r];
        for (std::size_t k = 0; k < layer.input_dim(); ++k) z += layer.weight(r, k) * act(k, c);
        next(r, c) = layer.activation == Activation::relu ? std::max(z, 0.0) : z;
      }
    }
    act = std::move(next);
  }
  return act;
}

/// Smallest |pre-activation| over every layer, used to stay clear of ReLU kinks.
inline double min_abs_preactivation(const NetworkParams& params, const Matrix& inputs) {
  Matrix act = inputs;
  double smallest = INFINITY;
  for (const DenseLayer& layer : params.layers) {
    Matrix next(layer.output_dim(), act.cols());
    for (std::size_t c = 0; c < act.cols(); ++c) {
      for (std::size_t r = 0; r < layer.output_dim(); ++r) {
        double z = layer.bias[r];
        for (std::size_t k = 0; k < layer.input_dim(); ++k) z += layer.weight(r, k) * act(k, c);
        if (layer.activation == Activation::relu) smallest = std::min(smallest, std::abs(z));
        next(r, c) = layer.activation == Activation::relu ? std::max(z, 0.0) : z;
      }
    }
    act = std::move(next);
  }
  return smallest;
}

}  // namespace fdl::testing
