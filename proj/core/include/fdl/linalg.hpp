#pragma once

#include <cstddef>
#include <vector>

#include "fdl/matrix.hpp"

namespace fdl {

/// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ * b without forming the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * bᵀ without forming the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// tr(Uᵀ S U), computed as Σ_ik U_ik (S U)_ik.
double trace_quadratic(const Matrix& u, const Matrix& s);

/// Relative asymmetry threshold: |s_ij - s_ji| <= kSymmetryTolerance * max(1, max|s|).
inline constexpr double kSymmetryTolerance = 1e-10;

bool is_symmetric(const Matrix& s, double tolerance = kSymmetryTolerance);

/// (S + Sᵀ)/2 after checking asymmetry is within tolerance; throws
/// DimensionError for non-square input and std::invalid_argument otherwise.
Matrix symmetrized(const Matrix& s);

/// Lower-triangular L with L Lᵀ = s. Throws NotPositiveDefiniteError naming
/// the failing pivot.
Matrix cholesky(const Matrix& s);

/// Solves L X = B for lower-triangular L.
Matrix solve_lower(const Matrix& lower, const Matrix& b);
/// Solves Lᵀ X = B for lower-triangular L.
Matrix solve_lower_transposed(const Matrix& lower, const Matrix& b);

struct EigenDecomposition {
  std::vector<double> values;  ///< descending
  Matrix vectors;              ///< column i pairs with values[i]
  std::size_t sweeps = 0;
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Stops when the off-diagonal Frobenius norm drops to 1e-12 of the input's
/// Frobenius norm, or after 100 sweeps. Eigenvalues come back in descending
/// order (stable with respect to the Jacobi diagonal order); each eigenvector
/// is signed so that its largest-magnitude entry is positive.
EigenDecomposition sym_eig(const Matrix& s);

/// Solves S_B u = λ S_W u for symmetric S_B and symmetric positive definite
/// S_W via Cholesky reduction. The returned eigenvectors are S_W-orthonormal.
EigenDecomposition generalized_eig(const Matrix& s_b, const Matrix& s_w);

/// Flips each column so its largest-magnitude entry is positive.
void normalize_column_signs(Matrix& vectors);

}  // namespace fdl
