#include "fdl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fdl/error.hpp"

namespace fdl {
namespace {

constexpr double kJacobiRelativeTolerance = 1e-12;
constexpr std::size_t kJacobiMaxSweeps = 100;

void require_square(const Matrix& s, const char* what) {
  if (!s.is_square()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " + s.shape());
  }
}

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: cannot multiply " + a.shape() + " by " + b.shape());
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* crow = c.row(i).data();
    const double* arow = a.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("matmul_tn: cannot multiply transpose of " + a.shape() + " by " +
                         b.shape());
  }
  Matrix c(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* arow = a.row(k).data();
    const double* brow = b.row(k).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      double* crow = c.row(i).data();
      for (std::size_t j = 0; j < n; ++j) crow[j] += aki * brow[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul_nt: cannot multiply " + a.shape() + " by transpose of " +
                         b.shape());
  }
  Matrix c(a.rows(), b.rows());
  const std::size_t inner = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* brow = b.row(j).data();
      double sum = 0.0;
      for (std::size_t k = 0; k < inner; ++k) sum += arow[k] * brow[k];
      c(i, j) = sum;
    }
  }
  return c;
}

double trace_quadratic(const Matrix& u, const Matrix& s) {
  require_square(s, "trace_quadratic");
  if (s.rows() != u.rows()) {
    throw DimensionError("trace_quadratic: scatter " + s.shape() + " does not match projection " +
                         u.shape());
  }
  const Matrix su = matmul(s, u);
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) total += u.values()[i] * su.values()[i];
  return total;
}

bool is_symmetric(const Matrix& s, double tolerance) {
  if (!s.is_square()) return false;
  const double limit = tolerance * std::max(1.0, s.max_abs());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = i + 1; j < s.cols(); ++j) {
      if (!(std::abs(s(i, j) - s(j, i)) <= limit)) return false;
    }
  }
  return true;
}

Matrix symmetrized(const Matrix& s) {
  require_square(s, "symmetrized");
  if (!is_symmetric(s)) {
    throw std::invalid_argument("matrix " + s.shape() + " is not symmetric within tolerance " +
                                std::to_string(kSymmetryTolerance));
  }
  Matrix out(s.rows(), s.cols());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    out(i, i) = s(i, i);
    for (std::size_t j = i + 1; j < s.cols(); ++j) {
      const double avg = 0.5 * (s(i, j) + s(j, i));
      out(i, j) = avg;
      out(j, i) = avg;
    }
  }
  return out;
}

Matrix cholesky(const Matrix& s) {
  const Matrix a = symmetrized(s);
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) {
      throw NotPositiveDefiniteError(
          "cholesky: non-positive pivot " + std::to_string(diag) + " at index " +
              std::to_string(j) + "; matrix is not positive definite",
          j);
    }
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

Matrix solve_lower(const Matrix& lower, const Matrix& b) {
  require_square(lower, "solve_lower");
  if (lower.rows() != b.rows()) {
    throw DimensionError("solve_lower: factor " + lower.shape() + " does not match rhs " +
                         b.shape());
  }
  const std::size_t n = lower.rows();
  Matrix x = b;
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const double lik = lower(i, k);
      if (lik == 0.0) continue;
      auto xk = x.row(k);
      for (std::size_t c = 0; c < x.cols(); ++c) xi[c] -= lik * xk[c];
    }
    const double inv = 1.0 / lower(i, i);
    for (double& v : xi) v *= inv;
  }
  return x;
}

Matrix solve_lower_transposed(const Matrix& lower, const Matrix& b) {
  require_square(lower, "solve_lower_transposed");
  if (lower.rows() != b.rows()) {
    throw DimensionError("solve_lower_transposed: factor " + lower.shape() +
                         " does not match rhs " + b.shape());
  }
  const std::size_t n = lower.rows();
  Matrix x = b;
  for (std::size_t ii = n; ii-- > 0;) {
    auto xi = x.row(ii);
    for (std::size_t k = ii + 1; k < n; ++k) {
      const double lki = lower(k, ii);
      if (lki == 0.0) continue;
      auto xk = x.row(k);
      for (std::size_t c = 0; c < x.cols(); ++c) xi[c] -= lki * xk[c];
    }
    const double inv = 1.0 / lower(ii, ii);
    for (double& v : xi) v *= inv;
  }
  return x;
}

void normalize_column_signs(Matrix& vectors) {
  for (std::size_t c = 0; c < vectors.cols(); ++c) {
    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (vectors.rows() > 0 && vectors(best, c) < 0.0) {
      for (std::size_t r = 0; r < vectors.rows(); ++r) vectors(r, c) = -vectors(r, c);
    }
  }
}

EigenDecomposition sym_eig(const Matrix& s) {
  Matrix a = symmetrized(s);
  const std::size_t n = a.rows();
  Matrix v = Matrix::identity(n);
  const double threshold = kJacobiRelativeTolerance * a.frobenius_norm();

  std::size_t sweep = 0;
  for (; sweep < kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= threshold) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation J(p, q, θ) chosen so that (Jᵀ A J)_pq = 0.
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  normalize_column_signs(out.vectors);
  return out;
}

EigenDecomposition generalized_eig(const Matrix& s_b, const Matrix& s_w) {
  require_square(s_b, "generalized_eig");
  require_square(s_w, "generalized_eig");
  if (s_b.rows() != s_w.rows()) {
    throw DimensionError("generalized_eig: S_B " + s_b.shape() + " and S_W " + s_w.shape() +
                         " differ in size");
  }
  const Matrix b = symmetrized(s_b);
  Matrix l;
  try {
    l = cholesky(s_w);
  } catch (const NotPositiveDefiniteError& e) {
    throw NotPositiveDefiniteError(
        std::string("generalized_eig: S_W is not positive definite (") + e.what() +
            "); increase mu_w to strengthen its diagonal",
        e.pivot());
  }
  // C = L⁻¹ S_B L⁻ᵀ = L⁻¹ (L⁻¹ S_B)ᵀ since S_B is symmetric.
  const Matrix y = solve_lower(l, b);
  const Matrix c = solve_lower(l, y.transposed());
  Matrix c_sym(c.rows(), c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = 0; j < c.cols(); ++j) c_sym(i, j) = 0.5 * (c(i, j) + c(j, i));
  }
  EigenDecomposition reduced = sym_eig(c_sym);
  EigenDecomposition out;
  out.values = std::move(reduced.values);
  out.sweeps = reduced.sweeps;
  out.vectors = solve_lower_transposed(l, reduced.vectors);
  normalize_column_signs(out.vectors);
  return out;
}

}  // namespace fdl
