#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "fdl/matrix.hpp"

namespace fdl {

enum class Activation : std::uint8_t { relu = 0, linear = 1 };

std::string_view to_string(Activation a);

/// One affine layer: out = act(weight * in + bias). weight is out x in.
struct DenseLayer {
  Matrix weight;
  std::vector<double> bias;
  Activation activation = Activation::relu;

  std::size_t input_dim() const noexcept { return weight.cols(); }
  std::size_t output_dim() const noexcept { return weight.rows(); }
  bool operator==(const DenseLayer&) const = default;
};

/// Backbone layers producing the q-dimensional latent embedding, followed by
/// the bias-free linear projection U (q x p) giving features f = Uᵀ o.
///
/// The Siamese branches all run through one NetworkParams value, so weight
/// sharing holds by construction.
struct NetworkParams {
  std::vector<DenseLayer> layers;
  Matrix projection;

  std::size_t input_dim() const;
  std::size_t latent_dim() const;
  std::size_t feature_dim() const { return projection.cols(); }

  /// Throws DimensionError if layer widths do not chain or U does not match.
  void validate() const;
  bool operator==(const NetworkParams&) const = default;
};

/// Layer widths (input, hidden..., latent) plus the feature dimension.
struct NetworkShape {
  std::vector<std::size_t> widths;
  std::size_t feature_dim = 0;
  Activation hidden_activation = Activation::relu;
  Activation latent_activation = Activation::relu;
};

/// Intermediates retained for backpropagation. activations[0] is the input
/// batch; activations.back() is the latent embedding.
struct ForwardTrace {
  std::vector<Matrix> pre_activations;
  std::vector<Matrix> activations;
  Matrix features;

  const Matrix& latent() const { return activations.back(); }
  std::size_t batch_size() const { return activations.front().cols(); }
};

/// Gradients shaped like NetworkParams plus the gradient for the inputs.
struct NetworkGradients {
  NetworkParams params;
  Matrix inputs;
};

/// He-uniform weights (bound √(6/fan_in)) for backbone layers, Xavier-uniform
/// (bound √(6/(q+p))) for U, zero biases.
NetworkParams init_params(const NetworkShape& shape, std::uint64_t seed);

/// Runs a d x b input batch through the backbone and the projection.
ForwardTrace forward(const NetworkParams& params, const Matrix& inputs);

/// Backpropagates a latent-space gradient. grad_u_direct is the loss's own
/// gradient for U (the Fisher losses use U directly) and is passed through
/// into the result.
NetworkGradients backward(const NetworkParams& params, const ForwardTrace& trace,
                          const Matrix& grad_latent, const Matrix& grad_u_direct);

/// Backpropagates a feature-space gradient: U receives latent * grad_featuresᵀ
/// and the latent receives U * grad_features.
NetworkGradients backward_features(const NetworkParams& params, const ForwardTrace& trace,
                                   const Matrix& grad_features);

/// params - learning_rate * grads, elementwise.
NetworkParams sgd_step(const NetworkParams& params, const NetworkParams& grads,
                       double learning_rate);

/// Zero-valued gradient container matching `params`.
NetworkParams zeros_like(const NetworkParams& params);

}  // namespace fdl
