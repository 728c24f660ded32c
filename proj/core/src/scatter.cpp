#include "fdl/scatter.hpp"

#include <map>
#include <string>

#include "fdl/error.hpp"
#include "fdl/linalg.hpp"

namespace fdl {
namespace {

void require_nonnegative(double mu, const char* name) {
  if (!(mu >= 0.0)) {
    throw ConfigError(std::string(name) + " must be >= 0, got " + std::to_string(mu));
  }
}

void add_to_diagonal(Matrix& m, double value) {
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += value;
}

// Σ_i (a_i - b_i)(a_i - b_i)ᵀ for masked columns, symmetric by construction.
Matrix difference_scatter(const Matrix& a, const Matrix& b, const std::uint8_t* mask,
                          std::uint8_t keep) {
  const std::size_t q = a.rows();
  Matrix s(q, q);
  std::vector<double> diff(q);
  for (std::size_t i = 0; i < a.cols(); ++i) {
    if (mask != nullptr && mask[i] != keep) continue;
    for (std::size_t r = 0; r < q; ++r) diff[r] = a(r, i) - b(r, i);
    for (std::size_t r = 0; r < q; ++r) {
      const double dr = diff[r];
      auto srow = s.row(r);
      for (std::size_t c = 0; c < q; ++c) srow[c] += dr * diff[c];
    }
  }
  return s;
}

}  // namespace

void EmbeddedTripletBatch::validate() const {
  if (anchor.rows() != neighbor.rows() || anchor.cols() != neighbor.cols() ||
      anchor.rows() != distant.rows() || anchor.cols() != distant.cols()) {
    throw DimensionError("triplet batch shape mismatch: anchor " + anchor.shape() +
                         ", neighbor " + neighbor.shape() + ", distant " + distant.shape());
  }
  if (anchor.cols() == 0 || anchor.rows() == 0) {
    throw DimensionError("triplet batch must hold at least one non-empty triplet");
  }
}

void EmbeddedPairBatch::validate() const {
  if (first.rows() != second.rows() || first.cols() != second.cols() ||
      y.size() != first.cols()) {
    throw DimensionError("pair batch shape mismatch: first " + first.shape() + ", second " +
                         second.shape() + ", " + std::to_string(y.size()) + " labels");
  }
  if (first.cols() == 0 || first.rows() == 0) {
    throw DimensionError("pair batch must hold at least one non-empty pair");
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] > 1) {
      throw ConfigError("pair label at index " + std::to_string(i) + " is " +
                        std::to_string(y[i]) + "; expected 0 or 1");
    }
  }
}

Matrix outer_product_sum(const Matrix& differences, std::span<const std::uint8_t> mask) {
  if (!mask.empty() && mask.size() != differences.cols()) {
    throw DimensionError("outer_product_sum: mask length " + std::to_string(mask.size()) +
                         " does not match " + differences.shape());
  }
  const Matrix zero(differences.rows(), differences.cols());
  return difference_scatter(differences, zero, mask.empty() ? nullptr : mask.data(), 1);
}

ScatterPair triplet_scatters(const EmbeddedTripletBatch& batch, double mu_w, double mu_b) {
  batch.validate();
  require_nonnegative(mu_w, "mu_w");
  require_nonnegative(mu_b, "mu_b");
  ScatterPair sp;
  sp.s_w = difference_scatter(batch.anchor, batch.neighbor, nullptr, 0);
  sp.s_b = difference_scatter(batch.anchor, batch.distant, nullptr, 0);
  add_to_diagonal(sp.s_w, mu_w);
  add_to_diagonal(sp.s_b, mu_b);
  sp.mu_w = mu_w;
  sp.mu_b = mu_b;
  return sp;
}

ScatterPair pair_scatters(const EmbeddedPairBatch& batch, double mu_w, double mu_b) {
  batch.validate();
  require_nonnegative(mu_w, "mu_w");
  require_nonnegative(mu_b, "mu_b");
  ScatterPair sp;
  sp.s_w = difference_scatter(batch.first, batch.second, batch.y.data(), 0);
  sp.s_b = difference_scatter(batch.first, batch.second, batch.y.data(), 1);
  add_to_diagonal(sp.s_w, mu_w);
  add_to_diagonal(sp.s_b, mu_b);
  sp.mu_w = mu_w;
  sp.mu_b = mu_b;
  return sp;
}

ScatterPair classical_scatters(const Matrix& data, std::span<const int> labels) {
  if (labels.size() != data.cols()) {
    throw DimensionError("classical_scatters: " + std::to_string(labels.size()) +
                         " labels for data " + data.shape());
  }
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  if (members.size() < 2) {
    throw ConfigError("classical_scatters: need at least 2 classes, got " +
                      std::to_string(members.size()));
  }

  // Σ_i Σ_j (x_i - x_j)(x_i - x_j)ᵀ over a set of n points equals
  // 2n Σ_i (x_i - m)(x_i - m)ᵀ with m the set mean. The within-class sum uses
  // per-class sets; all ordered pairs use the whole set, and the cross-class
  // sum is the difference.
  const std::size_t d = data.rows();
  auto centered_scatter = [&](std::span<const std::size_t> idx) {
    std::vector<double> mean(d, 0.0);
    for (std::size_t i : idx) {
      for (std::size_t r = 0; r < d; ++r) mean[r] += data(r, i);
    }
    for (double& m : mean) m /= static_cast<double>(idx.size());
    Matrix centered(d, idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
      for (std::size_t r = 0; r < d; ++r) centered(r, j) = data(r, idx[j]) - mean[r];
    }
    Matrix s = matmul_nt(centered, centered);
    s *= 2.0 * static_cast<double>(idx.size());
    return s;
  };

  ScatterPair sp;
  sp.s_w = Matrix(d, d);
  for (const auto& [label, idx] : members) sp.s_w += centered_scatter(idx);
  std::vector<std::size_t> all(labels.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  sp.s_b = centered_scatter(all);
  sp.s_b -= sp.s_w;
  // Restore exact symmetry lost to rounding in the subtraction.
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = r + 1; c < d; ++c) {
      sp.s_b(c, r) = sp.s_b(r, c);
      sp.s_w(c, r) = sp.s_w(r, c);
    }
  }
  return sp;
}

Matrix total_scatter(const ScatterPair& sp) { return sp.s_b + sp.s_w; }

}  // namespace fdl
