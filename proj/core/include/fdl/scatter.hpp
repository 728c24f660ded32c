#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fdl/matrix.hpp"

namespace fdl {

/// Default diagonal strengthening for both scatter matrices.
inline constexpr double kDefaultMu = 1e-4;

/// Intra-class (s_w) and inter-class (s_b) scatter matrices together with the
/// diagonal strengthening that was added to each.
struct ScatterPair {
  Matrix s_w;
  Matrix s_b;
  double mu_w = 0.0;
  double mu_b = 0.0;
};

/// Latent embeddings of a triplet mini-batch, one column per triplet.
struct EmbeddedTripletBatch {
  Matrix anchor;
  Matrix neighbor;
  Matrix distant;

  std::size_t dim() const noexcept { return anchor.rows(); }
  std::size_t size() const noexcept { return anchor.cols(); }
  void validate() const;
};

/// Pair labels: 0 marks an anchor-neighbor pair, 1 an anchor-distant pair.
using PairLabels = std::vector<std::uint8_t>;

/// Latent embeddings of a pair mini-batch, one column per pair.
struct EmbeddedPairBatch {
  Matrix first;
  Matrix second;
  PairLabels y;

  std::size_t dim() const noexcept { return first.rows(); }
  std::size_t size() const noexcept { return first.cols(); }
  void validate() const;
};

/// s_w = O_W O_Wᵀ + mu_w I and s_b = O_B O_Bᵀ + mu_b I where the columns of
/// O_W are anchor - neighbor and those of O_B are anchor - distant.
ScatterPair triplet_scatters(const EmbeddedTripletBatch& batch, double mu_w = kDefaultMu,
                             double mu_b = kDefaultMu);

/// Like triplet_scatters, but y = 0 pairs feed s_w and y = 1 pairs feed s_b.
/// A label with no pairs contributes only its mu·I.
ScatterPair pair_scatters(const EmbeddedPairBatch& batch, double mu_w = kDefaultMu,
                          double mu_b = kDefaultMu);

/// Pairwise-difference scatters over a labeled dataset (one sample per
/// column). Every ordered pair (i, j) is counted, so each unordered pair
/// contributes twice. Requires at least two distinct labels.
ScatterPair classical_scatters(const Matrix& data, std::span<const int> labels);

/// s_b + s_w.
Matrix total_scatter(const ScatterPair& sp);

/// Σ_i d_i d_iᵀ over the columns i of `differences` with mask[i] set (all
/// columns when mask is empty), accumulated in ascending column order.
Matrix outer_product_sum(const Matrix& differences, std::span<const std::uint8_t> mask = {});

}  // namespace fdl
