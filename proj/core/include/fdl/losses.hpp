#pragma once

#include "fdl/matrix.hpp"
#include "fdl/scatter.hpp"

namespace fdl {

/// Hyperparameters shared by the four losses.
struct LossConfig {
  double alpha = 0.25;   ///< margin
  double lambda = 0.1;   ///< 1 - ε, weight of the inter-class term (Fisher losses)
  double mu_w = kDefaultMu;
  double mu_b = kDefaultMu;

  /// Throws ConfigError for alpha < 0, mu < 0 or lambda outside (0, 1).
  void validate() const;
};

/// Value and gradients of a triplet-family loss.
///
/// For the feature-space triplet loss, grad_u is empty and the per-sample
/// gradients are with respect to features; for FDT they are with respect to
/// latent embeddings.
struct TripletLossOutput {
  double value = 0.0;
  bool active = false;           ///< some hinge is engaged
  double active_fraction = 0.0;  ///< fraction of hinges engaged
  Matrix grad_u;
  Matrix grad_anchor;
  Matrix grad_neighbor;
  Matrix grad_distant;
};

/// Value and gradients of a pair-family loss. See TripletLossOutput.
struct PairLossOutput {
  double value = 0.0;
  bool active = false;
  double active_fraction = 0.0;
  Matrix grad_u;
  Matrix grad_first;
  Matrix grad_second;
};

/// Σ_i [‖f_a - f_n‖² - ‖f_a - f_d‖² + α]₊ over feature columns.
TripletLossOutput triplet_loss(const Matrix& features_anchor, const Matrix& features_neighbor,
                               const Matrix& features_distant, double alpha);

/// Σ_i (1 - y)‖f_1 - f_2‖² + y [α - ‖f_1 - f_2‖²]₊ over feature columns.
PairLossOutput contrastive_loss(const Matrix& features_first, const Matrix& features_second,
                                const PairLabels& y, double alpha);

/// Fisher discriminant triplet loss on latent embeddings:
///   [(2 - λ) tr(Uᵀ S_W U) - λ tr(Uᵀ S_B U) + α]₊
/// with a single hinge over the whole batch. When the hinge is inactive the
/// value and every gradient are exactly zero.
TripletLossOutput fdt_loss(const EmbeddedTripletBatch& batch, const Matrix& u,
                           const LossConfig& cfg);

/// Un-hinged FDT objective written with the total-scatter penalty:
///   tr(Uᵀ S_W U) - tr(Uᵀ S_B U) + ε tr(Uᵀ S_T U),  S_T = S_B + S_W.
/// Equals the bracket of fdt_loss (minus α) when λ = 1 - ε.
double fdt_loss_epsilon_form(const EmbeddedTripletBatch& batch, const Matrix& u, double epsilon,
                             const LossConfig& cfg);

/// Fisher discriminant contrastive loss on latent embeddings:
///   (2 - λ) tr(Uᵀ S̃_W U) + [-λ tr(Uᵀ S̃_B U) + α]₊
/// Only the inter-class term is hinged.
PairLossOutput fdc_loss(const EmbeddedPairBatch& batch, const Matrix& u, const LossConfig& cfg);

}  // namespace fdl
