#include "fdl/losses.hpp"

#include <string>

#include "fdl/error.hpp"
#include "fdl/linalg.hpp"

namespace fdl {
namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + a.shape() + " vs " +
                         b.shape());
  }
}

void require_projection(const Matrix& u, std::size_t latent_dim, const char* what) {
  if (u.rows() != latent_dim || u.cols() == 0) {
    throw DimensionError(std::string(what) + ": projection " + u.shape() +
                         " does not map latent dimension " + std::to_string(latent_dim));
  }
}

double squared_distance(const Matrix& a, const Matrix& b, std::size_t col) {
  double sum = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double diff = a(r, col) - b(r, col);
    sum += diff * diff;
  }
  return sum;
}

// U Uᵀ D for a q x b difference matrix D.
Matrix project_back(const Matrix& u, const Matrix& differences) {
  return matmul(u, matmul_tn(u, differences));
}

}  // namespace

void LossConfig::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0, got " + std::to_string(alpha));
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw ConfigError("lambda must lie in (0, 1), got " + std::to_string(lambda));
  }
  if (!(mu_w >= 0.0)) throw ConfigError("mu_w must be >= 0, got " + std::to_string(mu_w));
  if (!(mu_b >= 0.0)) throw ConfigError("mu_b must be >= 0, got " + std::to_string(mu_b));
}

TripletLossOutput triplet_loss(const Matrix& features_anchor, const Matrix& features_neighbor,
                               const Matrix& features_distant, double alpha) {
  require_same_shape(features_anchor, features_neighbor, "triplet_loss");
  require_same_shape(features_anchor, features_distant, "triplet_loss");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0, got " + std::to_string(alpha));

  const std::size_t p = features_anchor.rows();
  const std::size_t b = features_anchor.cols();
  TripletLossOutput out;
  out.grad_anchor = Matrix(p, b);
  out.grad_neighbor = Matrix(p, b);
  out.grad_distant = Matrix(p, b);

  std::size_t engaged = 0;
  for (std::size_t i = 0; i < b; ++i) {
    const double arg = squared_distance(features_anchor, features_neighbor, i) -
                       squared_distance(features_anchor, features_distant, i) + alpha;
    if (arg <= 0.0) continue;
    ++engaged;
    out.value += arg;
    for (std::size_t r = 0; r < p; ++r) {
      const double fa = features_anchor(r, i);
      const double fn = features_neighbor(r, i);
      const double fd = features_distant(r, i);
      out.grad_anchor(r, i) = 2.0 * (fd - fn);
      out.grad_neighbor(r, i) = -2.0 * (fa - fn);
      out.grad_distant(r, i) = 2.0 * (fa - fd);
    }
  }
  out.active = engaged > 0;
  out.active_fraction = b == 0 ? 0.0 : static_cast<double>(engaged) / static_cast<double>(b);
  return out;
}

PairLossOutput contrastive_loss(const Matrix& features_first, const Matrix& features_second,
                                const PairLabels& y, double alpha) {
  require_same_shape(features_first, features_second, "contrastive_loss");
  if (y.size() != features_first.cols()) {
    throw DimensionError("contrastive_loss: " + std::to_string(y.size()) + " labels for " +
                         std::to_string(features_first.cols()) + " pairs");
  }
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0, got " + std::to_string(alpha));

  const std::size_t p = features_first.rows();
  const std::size_t b = features_first.cols();
  PairLossOutput out;
  out.grad_first = Matrix(p, b);
  out.grad_second = Matrix(p, b);

  std::size_t dissimilar = 0;
  std::size_t engaged = 0;
  for (std::size_t i = 0; i < b; ++i) {
    if (y[i] > 1) throw ConfigError("pair label must be 0 or 1 at index " + std::to_string(i));
    const double dist = squared_distance(features_first, features_second, i);
    double coeff = 0.0;
    if (y[i] == 0) {
      out.value += dist;
      coeff = 2.0;
    } else {
      ++dissimilar;
      const double arg = alpha - dist;
      if (arg <= 0.0) continue;
      ++engaged;
      out.value += arg;
      coeff = -2.0;
    }
    for (std::size_t r = 0; r < p; ++r) {
      const double g = coeff * (features_first(r, i) - features_second(r, i));
      out.grad_first(r, i) = g;
      out.grad_second(r, i) = -g;
    }
  }
  out.active = engaged > 0;
  out.active_fraction =
      dissimilar == 0 ? 0.0 : static_cast<double>(engaged) / static_cast<double>(dissimilar);
  return out;
}

TripletLossOutput fdt_loss(const EmbeddedTripletBatch& batch, const Matrix& u,
                           const LossConfig& cfg) {
  batch.validate();
  cfg.validate();
  require_projection(u, batch.dim(), "fdt_loss");

  const double lambda = cfg.lambda;
  const ScatterPair sp = triplet_scatters(batch, cfg.mu_w, cfg.mu_b);
  const double arg = (2.0 - lambda) * trace_quadratic(u, sp.s_w) -
                     lambda * trace_quadratic(u, sp.s_b) + cfg.alpha;

  const std::size_t q = batch.dim();
  const std::size_t b = batch.size();
  TripletLossOutput out;
  out.grad_u = Matrix(u.rows(), u.cols());
  out.grad_anchor = Matrix(q, b);
  out.grad_neighbor = Matrix(q, b);
  out.grad_distant = Matrix(q, b);
  if (arg <= 0.0) return out;

  out.value = arg;
  out.active = true;
  out.active_fraction = 1.0;

  const double pull = 2.0 * (2.0 - lambda);
  const double push = 2.0 * lambda;
  out.grad_u = matmul(sp.s_w, u) * pull;
  out.grad_u.add_scaled(matmul(sp.s_b, u), -push);

  const Matrix intra = batch.anchor - batch.neighbor;
  const Matrix inter = batch.anchor - batch.distant;
  const Matrix intra_back = project_back(u, intra);
  const Matrix inter_back = project_back(u, inter);
  out.grad_anchor = intra_back * pull;
  out.grad_anchor.add_scaled(inter_back, -push);
  out.grad_neighbor = intra_back * -pull;
  out.grad_distant = inter_back * push;
  return out;
}

double fdt_loss_epsilon_form(const EmbeddedTripletBatch& batch, const Matrix& u, double epsilon,
                             const LossConfig& cfg) {
  batch.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  }
  if (!(cfg.mu_w >= 0.0 && cfg.mu_b >= 0.0)) throw ConfigError("mu_w and mu_b must be >= 0");
  require_projection(u, batch.dim(), "fdt_loss_epsilon_form");

  const ScatterPair sp = triplet_scatters(batch, cfg.mu_w, cfg.mu_b);
  const Matrix s_t = total_scatter(sp);
  return trace_quadratic(u, sp.s_w) - trace_quadratic(u, sp.s_b) +
         epsilon * trace_quadratic(u, s_t);
}

PairLossOutput fdc_loss(const EmbeddedPairBatch& batch, const Matrix& u, const LossConfig& cfg) {
  batch.validate();
  cfg.validate();
  require_projection(u, batch.dim(), "fdc_loss");

  const double lambda = cfg.lambda;
  const ScatterPair sp = pair_scatters(batch, cfg.mu_w, cfg.mu_b);
  const double pull_term = (2.0 - lambda) * trace_quadratic(u, sp.s_w);
  const double hinge_arg = -lambda * trace_quadratic(u, sp.s_b) + cfg.alpha;
  const bool engaged = hinge_arg > 0.0;

  PairLossOutput out;
  out.value = pull_term + (engaged ? hinge_arg : 0.0);
  out.active = engaged;
  out.active_fraction = engaged ? 1.0 : 0.0;

  const double pull = 2.0 * (2.0 - lambda);
  const double push = engaged ? 2.0 * lambda : 0.0;
  out.grad_u = matmul(sp.s_w, u) * pull;
  if (engaged) out.grad_u.add_scaled(matmul(sp.s_b, u), -push);

  // Per-pair coefficient on U Uᵀ (o_1 - o_2): pull for similar pairs, -push
  // for dissimilar ones.
  Matrix diff = batch.first - batch.second;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double coeff = batch.y[i] == 0 ? pull : -push;
    for (std::size_t r = 0; r < diff.rows(); ++r) diff(r, i) *= coeff;
  }
  out.grad_first = project_back(u, diff);
  out.grad_second = out.grad_first * -1.0;
  return out;
}

}  // namespace fdl
