#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "fdl/matrix.hpp"
#include "fdl/scatter.hpp"

namespace fdl {

/// Classical FDA subspace: columns of `projection` are the top-p generalized
/// eigenvectors of (S_B, S_W + mu_w I), S_W-orthonormal.
struct FdaModel {
  Matrix projection;  ///< d x p
  std::vector<double> eigenvalues;  ///< length p, descending
  double mu_w = kDefaultMu;
};

FdaModel fda_fit(const Matrix& data, std::span<const int> labels, std::size_t p,
                 double mu_w = kDefaultMu);

/// projectionᵀ * data.
Matrix fda_transform(const FdaModel& model, const Matrix& data);

/// JSON: {"dim", "p", "mu_w", "eigenvalues", "projection": [[row]...]}
void save_fda_model(const FdaModel& model, const std::filesystem::path& path);
FdaModel load_fda_model(const std::filesystem::path& path);

}  // namespace fdl
