#include "fdl/backbone.hpp"

#include <cmath>
#include <string>

#include "fdl/error.hpp"
#include "fdl/linalg.hpp"
#include "fdl/random.hpp"

namespace fdl {
namespace {

void apply_activation(Activation a, Matrix& m) {
  if (a == Activation::relu) {
    for (double& v : m.values()) v = v > 0.0 ? v : 0.0;
  }
}

// grad ⊙ act'(pre); ReLU's derivative at 0 is taken as 0.
void mask_by_derivative(Activation a, const Matrix& pre, Matrix& grad) {
  if (a != Activation::relu) return;
  auto g = grad.values();
  auto z = pre.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(z[i] > 0.0)) g[i] = 0.0;
  }
}

void require_same_shape(const Matrix& a, const Matrix& b, const std::string& what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(what + ": shape mismatch " + a.shape() + " vs " + b.shape());
  }
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu:
      return "relu";
    case Activation::linear:
      return "linear";
  }
  return "unknown";
}

std::size_t NetworkParams::input_dim() const {
  return layers.empty() ? projection.rows() : layers.front().input_dim();
}

std::size_t NetworkParams::latent_dim() const {
  return layers.empty() ? projection.rows() : layers.back().output_dim();
}

void NetworkParams::validate() const {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& layer = layers[l];
    if (layer.weight.empty()) {
      throw DimensionError("layer " + std::to_string(l) + " has an empty weight matrix");
    }
    if (layer.bias.size() != layer.output_dim()) {
      throw DimensionError("layer " + std::to_string(l) + " bias length " +
                           std::to_string(layer.bias.size()) + " does not match weight " +
                           layer.weight.shape());
    }
    if (l > 0 && layers[l - 1].output_dim() != layer.input_dim()) {
      throw DimensionError("layer " + std::to_string(l) + " expects input width " +
                           std::to_string(layer.input_dim()) + " but layer " +
                           std::to_string(l - 1) + " produces " +
                           std::to_string(layers[l - 1].output_dim()));
    }
  }
  if (projection.rows() != latent_dim() || projection.cols() == 0) {
    throw DimensionError("projection " + projection.shape() + " does not map latent width " +
                         std::to_string(latent_dim()));
  }
  if (projection.cols() > projection.rows()) {
    throw DimensionError("projection " + projection.shape() +
                         " has feature dimension p greater than latent dimension q");
  }
}

NetworkParams init_params(const NetworkShape& shape, std::uint64_t seed) {
  if (shape.widths.size() < 2) {
    throw ConfigError("network shape needs an input width and at least one layer width");
  }
  if (shape.feature_dim == 0) throw ConfigError("feature dimension p must be >= 1");
  for (std::size_t w : shape.widths) {
    if (w == 0) throw ConfigError("layer widths must be >= 1");
  }
  Rng rng(seed);
  NetworkParams params;
  const std::size_t n_layers = shape.widths.size() - 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t fan_in = shape.widths[l];
    const std::size_t fan_out = shape.widths[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    DenseLayer layer;
    layer.weight = Matrix(fan_out, fan_in);
    for (double& w : layer.weight.values()) w = rng.uniform(-bound, bound);
    layer.bias.assign(fan_out, 0.0);
    layer.activation = l + 1 == n_layers ? shape.latent_activation : shape.hidden_activation;
    params.layers.push_back(std::move(layer));
  }
  const std::size_t q = shape.widths.back();
  const std::size_t p = shape.feature_dim;
  const double bound = std::sqrt(6.0 / static_cast<double>(q + p));
  params.projection = Matrix(q, p);
  for (double& w : params.projection.values()) w = rng.uniform(-bound, bound);
  params.validate();
  return params;
}

ForwardTrace forward(const NetworkParams& params, const Matrix& inputs) {
  if (inputs.rows() != params.input_dim()) {
    throw DimensionError("forward: input batch " + inputs.shape() + " does not match input width " +
                         std::to_string(params.input_dim()));
  }
  ForwardTrace trace;
  trace.activations.reserve(params.layers.size() + 1);
  trace.pre_activations.reserve(params.layers.size());
  trace.activations.push_back(inputs);
  for (const DenseLayer& layer : params.layers) {
    Matrix z = matmul(layer.weight, trace.activations.back());
    for (std::size_t r = 0; r < z.rows(); ++r) {
      const double b = layer.bias[r];
      for (double& v : z.row(r)) v += b;
    }
    Matrix a = z;
    apply_activation(layer.activation, a);
    trace.pre_activations.push_back(std::move(z));
    trace.activations.push_back(std::move(a));
  }
  trace.features = matmul_tn(params.projection, trace.latent());
  return trace;
}

NetworkGradients backward(const NetworkParams& params, const ForwardTrace& trace,
                          const Matrix& grad_latent, const Matrix& grad_u_direct) {
  if (trace.activations.size() != params.layers.size() + 1) {
    throw DimensionError("backward: trace has " + std::to_string(trace.activations.size()) +
                         " activations for a network of " + std::to_string(params.layers.size()) +
                         " layers");
  }
  require_same_shape(grad_latent, trace.latent(), "backward: latent gradient");
  require_same_shape(grad_u_direct, params.projection, "backward: projection gradient");

  NetworkGradients grads;
  grads.params.projection = grad_u_direct;
  grads.params.layers.resize(params.layers.size());

  Matrix delta = grad_latent;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const DenseLayer& layer = params.layers[l];
    if (trace.pre_activations[l].rows() != layer.output_dim() ||
        trace.activations[l].rows() != layer.input_dim()) {
      throw DimensionError("backward: stale trace at layer " + std::to_string(l));
    }
    mask_by_derivative(layer.activation, trace.pre_activations[l], delta);
    DenseLayer& g = grads.params.layers[l];
    g.activation = layer.activation;
    g.weight = matmul_nt(delta, trace.activations[l]);
    g.bias.assign(layer.output_dim(), 0.0);
    for (std::size_t r = 0; r < delta.rows(); ++r) {
      double sum = 0.0;
      for (double v : delta.row(r)) sum += v;
      g.bias[r] = sum;
    }
    delta = matmul_tn(layer.weight, delta);
  }
  grads.inputs = std::move(delta);
  return grads;
}

NetworkGradients backward_features(const NetworkParams& params, const ForwardTrace& trace,
                                   const Matrix& grad_features) {
  require_same_shape(grad_features, trace.features, "backward_features: feature gradient");
  const Matrix grad_u = matmul_nt(trace.latent(), grad_features);
  const Matrix grad_latent = matmul(params.projection, grad_features);
  return backward(params, trace, grad_latent, grad_u);
}

NetworkParams sgd_step(const NetworkParams& params, const NetworkParams& grads,
                       double learning_rate) {
  if (grads.layers.size() != params.layers.size()) {
    throw DimensionError("sgd_step: gradient has " + std::to_string(grads.layers.size()) +
                         " layers, parameters have " + std::to_string(params.layers.size()));
  }
  NetworkParams out = params;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const DenseLayer& g = grads.layers[l];
    DenseLayer& layer = out.layers[l];
    require_same_shape(layer.weight, g.weight, "sgd_step: layer " + std::to_string(l));
    if (g.bias.size() != layer.bias.size()) {
      throw DimensionError("sgd_step: bias length mismatch at layer " + std::to_string(l));
    }
    layer.weight.add_scaled(g.weight, -learning_rate);
    for (std::size_t i = 0; i < layer.bias.size(); ++i) layer.bias[i] -= learning_rate * g.bias[i];
  }
  require_same_shape(out.projection, grads.projection, "sgd_step: projection");
  out.projection.add_scaled(grads.projection, -learning_rate);
  return out;
}

NetworkParams zeros_like(const NetworkParams& params) {
  NetworkParams z;
  z.projection = Matrix(params.projection.rows(), params.projection.cols());
  for (const DenseLayer& layer : params.layers) {
    z.layers.push_back({Matrix(layer.weight.rows(), layer.weight.cols()),
                        std::vector<double>(layer.bias.size(), 0.0), layer.activation});
  }
  return z;
}

}  // namespace fdl
