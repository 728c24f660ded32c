#include "fdl/backbone.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "fdl/checkpoint.hpp"
#include "fdl/error.hpp"
#include "fdl/linalg.hpp"
#include "fdl/losses.hpp"
#include "oracles.hpp"

namespace fdl {
namespace {

using testing::random_matrix;

NetworkParams small_net(std::uint64_t seed, Activation latent = Activation::relu) {
  return init_params({{6, 8, 5}, 3, Activation::relu, latent}, seed);
}

TEST(InitParams, ShapesChainThroughLayers) {
  const NetworkParams p = init_params({{4, 8, 3}, 2}, 1);
  ASSERT_EQ(p.layers.size(), 2u);
  EXPECT_EQ(p.layers[0].weight.shape(), "8x4");
  EXPECT_EQ(p.layers[1].weight.shape(), "3x8");
  EXPECT_EQ(p.projection.shape(), "3x2");
  EXPECT_EQ(p.input_dim(), 4u);
  EXPECT_EQ(p.latent_dim(), 3u);
  EXPECT_EQ(p.feature_dim(), 2u);
}

TEST(InitParams, DeterministicUnderSeed) {
  EXPECT_EQ(small_net(5), small_net(5));
  EXPECT_NE(small_net(5), small_net(6));
}

TEST(InitParams, WeightsWithinUniformBoundsAndBiasesZero) {
  const NetworkParams p = init_params({{30, 20, 10}, 4}, 2);
  for (const DenseLayer& layer : p.layers) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.input_dim()));
    EXPECT_LE(layer.weight.max_abs(), bound);
    for (double b : layer.bias) EXPECT_EQ(b, 0.0);
  }
  EXPECT_LE(p.projection.max_abs(), std::sqrt(6.0 / 14.0));
}

TEST(InitParams, RejectsEmptyOrInvalidShape) {
  EXPECT_ANY_THROW(init_params({{}, 2}, 1));
  EXPECT_ANY_THROW(init_params({{5}, 2}, 1));
  EXPECT_ANY_THROW(init_params({{5, 3}, 4}, 1));
}

TEST(Forward, ZeroParamsGiveZeroOutputs) {
  NetworkParams p = zeros_like(small_net(1));
  Rng rng(1);
  const ForwardTrace t = forward(p, random_matrix(6, 3, rng));
  EXPECT_EQ(t.latent(), Matrix(5, 3));
  EXPECT_EQ(t.features, Matrix(3, 3));
}

TEST(Forward, IdentityLinearLayerPassesInputsThrough) {
  NetworkParams p;
  p.layers.push_back({Matrix::identity(3), std::vector<double>(3, 0.0), Activation::linear});
  p.projection = Matrix::identity(3);
  const Matrix x{{1, -2}, {3, 0.5}, {-1, 4}};
  const ForwardTrace t = forward(p, x);
  EXPECT_EQ(t.latent(), x);
  EXPECT_EQ(t.features, x);
}

TEST(Forward, MatchesLoopOracleAndProjectionIdentity) {
  Rng rng(2);
  NetworkParams p = small_net(3);
  for (auto& layer : p.layers) {
    for (double& b : layer.bias) b = rng.uniform(-0.5, 0.5);
  }
  const Matrix x = random_matrix(6, 7, rng);
  const ForwardTrace t = forward(p, x);
  EXPECT_LE(testing::relative_frobenius_error(t.latent(), testing::brute_forward_latent(p, x)),
            1e-14);
  EXPECT_EQ(t.features, matmul_tn(p.projection, t.latent()));
}

TEST(Forward, RejectsInputDimensionMismatch) {
  EXPECT_THROW(forward(small_net(1), Matrix(5, 2)), DimensionError);
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  const NetworkParams p = small_net(4);
  Rng rng(4);
  const ForwardTrace t = forward(p, random_matrix(6, 3, rng));
  const NetworkGradients g = backward(p, t, Matrix(5, 3), Matrix(5, 3));
  EXPECT_EQ(g.params, zeros_like(p));
  EXPECT_EQ(g.inputs, Matrix(6, 3));
}

TEST(Backward, SingleLinearLayerQuadraticLoss) {
  Rng rng(5);
  NetworkParams p;
  p.layers.push_back({random_matrix(3, 4, rng), std::vector<double>(3, 0.0), Activation::linear});
  p.projection = random_matrix(3, 2, rng);
  const Matrix x = random_matrix(4, 2, rng);
  const ForwardTrace t = forward(p, x);
  const NetworkGradients g = backward(p, t, t.latent(), Matrix(3, 2));
  EXPECT_LE(testing::relative_frobenius_error(g.params.layers[0].weight, matmul_nt(t.latent(), x)),
            1e-14);
}

TEST(Backward, RejectsStaleTrace) {
  const NetworkParams p = small_net(6);
  Rng rng(6);
  const ForwardTrace t = forward(p, random_matrix(6, 3, rng));
  EXPECT_THROW(backward(p, t, Matrix(5, 4), Matrix(5, 3)), DimensionError);
  EXPECT_THROW(backward(init_params({{6, 4, 5}, 3}, 1), t, Matrix(5, 3), Matrix(5, 3)),
               DimensionError);
}

TEST(Backward, FdtCompositeMatchesEndToEndFiniteDifferences) {
  Rng rng(7);
  NetworkParams p = small_net(7);
  Matrix xa = random_matrix(6, 4, rng, 0.0, 1.0);
  Matrix xn = random_matrix(6, 4, rng, 0.0, 1.0);
  Matrix xd = random_matrix(6, 4, rng, 0.0, 1.0);
  const LossConfig cfg;
  const auto loss_and_grads = [&](bool grads) {
    const ForwardTrace ta = forward(p, xa);
    const ForwardTrace tn = forward(p, xn);
    const ForwardTrace td = forward(p, xd);
    const TripletLossOutput out =
        fdt_loss({ta.latent(), tn.latent(), td.latent()}, p.projection, cfg);
    NetworkParams total = zeros_like(p);
    if (grads) {
      total = backward(p, ta, out.grad_anchor, out.grad_u).params;
      const NetworkParams gn = backward(p, tn, out.grad_neighbor, Matrix(5, 3)).params;
      const NetworkParams gd = backward(p, td, out.grad_distant, Matrix(5, 3)).params;
      for (std::size_t l = 0; l < p.layers.size(); ++l) {
        total.layers[l].weight += gn.layers[l].weight;
        total.layers[l].weight += gd.layers[l].weight;
        for (std::size_t i = 0; i < total.layers[l].bias.size(); ++i) {
          total.layers[l].bias[i] += gn.layers[l].bias[i] + gd.layers[l].bias[i];
        }
      }
    }
    return std::make_pair(out.value, total);
  };
  const double kink = std::min({testing::min_abs_preactivation(p, xa),
                                testing::min_abs_preactivation(p, xn),
                                testing::min_abs_preactivation(p, xd)});
  ASSERT_GT(kink, 1e-3) << "sampled configuration sits on a ReLU kink";
  const auto [value, grads] = loss_and_grads(true);
  ASSERT_GT(value, 0.0);
  const auto f = [&] { return loss_and_grads(false).first; };
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    EXPECT_LE(testing::worst_gradient_error(p.layers[l].weight.values(),
                                            grads.layers[l].weight.values(), f),
              1e-4);
    EXPECT_LE(testing::worst_gradient_error(p.layers[l].bias, grads.layers[l].bias, f), 1e-4);
  }
  EXPECT_LE(testing::worst_gradient_error(p.projection.values(), grads.projection.values(), f),
            1e-4);
}

TEST(BackwardFeatures, ProjectionGradientIsLatentTimesUpstream) {
  Rng rng(8);
  const NetworkParams p = small_net(8);
  const ForwardTrace t = forward(p, random_matrix(6, 3, rng));
  const Matrix gf = random_matrix(3, 3, rng);
  const NetworkGradients g = backward_features(p, t, gf);
  EXPECT_LE(testing::relative_frobenius_error(g.params.projection, matmul_nt(t.latent(), gf)),
            1e-14);
}

TEST(SgdStep, Examples) {
  const NetworkParams p = small_net(9);
  NetworkParams g = small_net(10);
  EXPECT_EQ(sgd_step(p, g, 0.0), p);

  NetworkParams one;
  one.layers.push_back({Matrix{{1.0}}, {1.0}, Activation::linear});
  one.projection = Matrix{{1.0}};
  NetworkParams grad;
  grad.layers.push_back({Matrix{{2.0}}, {2.0}, Activation::linear});
  grad.projection = Matrix{{2.0}};
  const NetworkParams stepped = sgd_step(one, grad, 0.1);
  EXPECT_DOUBLE_EQ(stepped.layers[0].weight(0, 0), 0.8);
  EXPECT_DOUBLE_EQ(stepped.layers[0].bias[0], 0.8);
  EXPECT_DOUBLE_EQ(stepped.projection(0, 0), 0.8);
}

TEST(SgdStep, ElementwiseOracleAndShapeCheck) {
  const NetworkParams p = small_net(11);
  const NetworkParams g = small_net(12);
  const NetworkParams s = sgd_step(p, g, 0.01);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    for (std::size_t i = 0; i < p.layers[l].weight.values().size(); ++i) {
      EXPECT_EQ(s.layers[l].weight.values()[i],
                p.layers[l].weight.values()[i] - 0.01 * g.layers[l].weight.values()[i]);
    }
  }
  EXPECT_THROW(sgd_step(p, init_params({{6, 4, 5}, 3}, 1), 0.1), DimensionError);
}

TEST(Checkpoint, BitExactRoundTrip) {
  NetworkParams p = small_net(13, Activation::linear);
  p.layers[0].bias[2] = -0.0;
  p.layers[1].bias[0] = 1e-310;
  const NetworkParams back = deserialize_params(serialize_params(p));
  EXPECT_EQ(serialize_params(back), serialize_params(p));
  EXPECT_EQ(back, p);
  EXPECT_EQ(back.layers[1].activation, Activation::linear);
}

TEST(Checkpoint, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "fdl_backbone_test.bin";
  const NetworkParams p = small_net(14);
  save_checkpoint(p, path);
  EXPECT_EQ(load_checkpoint(path), p);
  std::filesystem::remove(path);
}

TEST(Checkpoint, HeaderStartsWithMagic) {
  const auto bytes = serialize_params(small_net(15));
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 7), "FDLNET1");
}

TEST(Checkpoint, RejectsCorruption) {
  auto bytes = serialize_params(small_net(16));
  auto bad_magic = bytes;
  bad_magic[3] ^= 0xFF;
  EXPECT_THROW(deserialize_params(bad_magic), BadMagicError);
  auto truncated = bytes;
  truncated.resize(truncated.size() - 3);
  EXPECT_THROW(deserialize_params(truncated), TruncatedFileError);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(deserialize_params(trailing), FormatError);
  EXPECT_THROW(load_checkpoint("/nonexistent/fdl.bin"), IoError);
}

}  // namespace
}  // namespace fdl
