#include "fdl/scatter.hpp"

#include <gtest/gtest.h>

#include <numeric>

#include "fdl/error.hpp"
#include "fdl/linalg.hpp"
#include "oracles.hpp"

namespace fdl {
namespace {

using testing::random_matrix;

EmbeddedTripletBatch random_triplets(std::size_t q, std::size_t b, Rng& rng) {
  return {random_matrix(q, b, rng), random_matrix(q, b, rng), random_matrix(q, b, rng)};
}

EmbeddedPairBatch random_pairs(std::size_t q, std::size_t b, Rng& rng) {
  EmbeddedPairBatch batch{random_matrix(q, b, rng), random_matrix(q, b, rng), PairLabels(b)};
  for (auto& y : batch.y) y = static_cast<std::uint8_t>(rng.uniform_index(2));
  return batch;
}

double min_eigenvalue(const Matrix& s) { return sym_eig(s).values.back(); }

TEST(TripletScatters, CoincidentNeighborsGiveZeroIntraScatter) {
  Rng rng(1);
  const Matrix a = random_matrix(3, 4, rng);
  const ScatterPair sp = triplet_scatters({a, a, random_matrix(3, 4, rng)}, 0.0, 0.0);
  EXPECT_EQ(sp.s_w, Matrix(3, 3));
}

TEST(TripletScatters, ScalarSubstitution) {
  const ScatterPair sp = triplet_scatters({Matrix{{0}}, Matrix{{1}}, Matrix{{2}}}, 0.0, 0.0);
  EXPECT_EQ(sp.s_w, Matrix{{1}});
  EXPECT_EQ(sp.s_b, Matrix{{4}});
}

TEST(TripletScatters, MatchesOuterProductOracleExactly) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const EmbeddedTripletBatch batch = random_triplets(3, 4, rng);
    const ScatterPair sp = triplet_scatters(batch, 0.01, 0.02);
    const auto all = [](std::size_t) { return true; };
    EXPECT_EQ(sp.s_w, testing::brute_difference_scatter(batch.anchor, batch.neighbor, all, 0.01));
    EXPECT_EQ(sp.s_b, testing::brute_difference_scatter(batch.anchor, batch.distant, all, 0.02));
    EXPECT_EQ(sp.mu_w, 0.01);
    EXPECT_EQ(sp.mu_b, 0.02);
  }
}

TEST(TripletScatters, RejectsShapeMismatch) {
  EXPECT_THROW(triplet_scatters({Matrix(3, 4), Matrix(3, 3), Matrix(3, 4)}), DimensionError);
  EXPECT_THROW(triplet_scatters({Matrix(3, 4), Matrix(3, 4), Matrix(2, 4)}), DimensionError);
}

TEST(TripletScatters, SymmetricAndPositiveDefinite) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const ScatterPair sp = triplet_scatters(random_triplets(5, 3, rng), 1e-4, 1e-4);
    EXPECT_TRUE(is_symmetric(sp.s_w, 1e-10));
    EXPECT_TRUE(is_symmetric(sp.s_b, 1e-10));
    EXPECT_GT(min_eigenvalue(sp.s_w), 0.0);
    EXPECT_GT(min_eigenvalue(sp.s_b), 0.0);
    Matrix unstrengthened = sp.s_w;
    unstrengthened -= 1e-4 * Matrix::identity(5);
    EXPECT_GE(min_eigenvalue(unstrengthened), -1e-9);
  }
}

TEST(TripletScatters, RankBoundedByBatchSize) {
  Rng rng(4);
  const ScatterPair sp = triplet_scatters(random_triplets(6, 2, rng), 0.0, 0.0);
  const auto values = sym_eig(sp.s_w).values;
  const double scale = values.front();
  std::size_t rank = 0;
  for (double v : values) rank += v > 1e-10 * scale ? 1 : 0;
  EXPECT_EQ(rank, 2u);
}

TEST(TripletScatters, InvariantUnderBatchPermutation) {
  Rng rng(5);
  const EmbeddedTripletBatch batch = random_triplets(4, 6, rng);
  std::vector<std::size_t> perm(6);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(perm));
  const EmbeddedTripletBatch shuffled{batch.anchor.select_columns(perm),
                                      batch.neighbor.select_columns(perm),
                                      batch.distant.select_columns(perm)};
  const ScatterPair a = triplet_scatters(batch);
  const ScatterPair b = triplet_scatters(shuffled);
  EXPECT_LE(testing::relative_frobenius_error(b.s_w, a.s_w), 1e-14);
  EXPECT_LE(testing::relative_frobenius_error(b.s_b, a.s_b), 1e-14);
}

TEST(PairScatters, AllDissimilarLeavesIntraScatterEmpty) {
  Rng rng(6);
  EmbeddedPairBatch batch = random_pairs(3, 5, rng);
  std::fill(batch.y.begin(), batch.y.end(), std::uint8_t{1});
  EXPECT_EQ(pair_scatters(batch, 0.0, 0.0).s_w, Matrix(3, 3));
}

TEST(PairScatters, ScalarSubstitution) {
  const ScatterPair sp =
      pair_scatters({Matrix{{0, 0}}, Matrix{{1, 3}}, PairLabels{0, 1}}, 0.0, 0.0);
  EXPECT_EQ(sp.s_w, Matrix{{1}});
  EXPECT_EQ(sp.s_b, Matrix{{9}});
}

TEST(PairScatters, MatchesMaskedOracleExactly) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const EmbeddedPairBatch batch = random_pairs(4, 7, rng);
    const ScatterPair sp = pair_scatters(batch, 0.5, 0.25);
    const auto same = [&](std::size_t i) { return batch.y[i] == 0; };
    const auto diff = [&](std::size_t i) { return batch.y[i] == 1; };
    EXPECT_EQ(sp.s_w, testing::brute_difference_scatter(batch.first, batch.second, same, 0.5));
    EXPECT_EQ(sp.s_b, testing::brute_difference_scatter(batch.first, batch.second, diff, 0.25));
  }
}

TEST(PairScatters, RejectsBadLabelsAndShapes) {
  EXPECT_THROW(pair_scatters({Matrix(2, 2), Matrix(2, 2), PairLabels{0}}), DimensionError);
  EXPECT_THROW(pair_scatters({Matrix(2, 2), Matrix(3, 2), PairLabels{0, 1}}), DimensionError);
  EXPECT_ANY_THROW(pair_scatters({Matrix(2, 2), Matrix(2, 2), PairLabels{0, 2}}));
}

TEST(ClassicalScatters, IdenticalPointsGiveZero) {
  const Matrix data(2, 4, 1.5);
  const std::vector<int> labels{0, 0, 1, 1};
  const ScatterPair sp = classical_scatters(data, labels);
  EXPECT_EQ(sp.s_w, Matrix(2, 2));
  EXPECT_EQ(sp.s_b, Matrix(2, 2));
}

TEST(ClassicalScatters, TwoSingletonClasses) {
  const std::vector<int> labels{0, 1};
  const ScatterPair sp = classical_scatters(Matrix{{0, 2}}, labels);
  EXPECT_EQ(sp.s_w, Matrix{{0}});
  EXPECT_EQ(sp.s_b, Matrix{{8}});
}

TEST(ClassicalScatters, MatchesQuadrupleLoopOracle) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 9;
    const Matrix data = random_matrix(2, n, rng);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 3);
    const ScatterPair sp = classical_scatters(data, labels);
    const ScatterPair oracle = testing::brute_classical_scatters(data, labels);
    EXPECT_LE(testing::relative_frobenius_error(sp.s_w, oracle.s_w), 1e-12);
    EXPECT_LE(testing::relative_frobenius_error(sp.s_b, oracle.s_b), 1e-12);
    EXPECT_EQ(sp.s_w, sp.s_w.transposed());
    EXPECT_EQ(sp.s_b, sp.s_b.transposed());
  }
}

TEST(ClassicalScatters, RejectsSingleClassAndLengthMismatch) {
  const std::vector<int> one{3, 3, 3};
  EXPECT_ANY_THROW(classical_scatters(Matrix(2, 3), one));
  const std::vector<int> short_labels{0, 1};
  EXPECT_THROW(classical_scatters(Matrix(2, 3), short_labels), DimensionError);
}

TEST(TotalScatter, Examples) {
  EXPECT_EQ(total_scatter({Matrix(2, 2), Matrix(2, 2), 0, 0}), Matrix(2, 2));
  EXPECT_EQ(total_scatter({Matrix::identity(3), 2.0 * Matrix::identity(3), 0, 0}),
            3.0 * Matrix::identity(3));
  Rng rng(9);
  const ScatterPair sp = triplet_scatters(random_triplets(3, 4, rng));
  const Matrix t = total_scatter(sp);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(t(i, j), sp.s_w(i, j) + sp.s_b(i, j));
  }
}

}  // namespace
}  // namespace fdl
