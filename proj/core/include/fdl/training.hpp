#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "fdl/backbone.hpp"
#include "fdl/data_io.hpp"
#include "fdl/losses.hpp"
#include "fdl/run_config.hpp"
#include "fdl/sampling.hpp"

namespace fdl {

enum class EmbeddingSpace { latent, feature };

std::string_view to_string(EmbeddingSpace space);
std::optional<EmbeddingSpace> parse_embedding_space(std::string_view text);

/// Latent (q x m) or feature (p x m) embeddings of `inputs`, computed in
/// column chunks.
Matrix embed(const NetworkParams& params, const Matrix& inputs, EmbeddingSpace space,
             std::size_t chunk = 512);

/// Loss value and parameter/input gradients of one Siamese mini-batch.
/// grads.inputs stacks the per-branch input gradients column-wise in branch
/// order (anchor | neighbor | distant, or first | second).
struct StepResult {
  double loss = 0.0;
  double active_fraction = 0.0;
  NetworkGradients grads;
};

/// Triplet-family step (kind triplet or fdt). The three branches share one
/// forward pass over [x_a | x_n | x_d].
StepResult triplet_step(const NetworkParams& params, LossKind kind, const LossConfig& cfg,
                        const Matrix& x_anchor, const Matrix& x_neighbor,
                        const Matrix& x_distant);

/// Pair-family step (kind contrastive or fdc).
StepResult pair_step(const NetworkParams& params, LossKind kind, const LossConfig& cfg,
                     const Matrix& x_first, const Matrix& x_second, const PairLabels& y);

struct StepRecord {
  std::size_t step = 0;
  std::size_t epoch = 0;
  double loss = 0.0;
  double active_fraction = 0.0;
};

struct TrainResult {
  NetworkParams params;
  std::vector<StepRecord> steps;
  std::vector<double> epoch_mean_loss;
};

using StepObserver = std::function<void(const StepRecord&)>;

/// Seeds derived from RunConfig::seed for each random stream of a run.
struct RunSeeds {
  std::uint64_t init;
  std::uint64_t sampling;
  std::uint64_t shuffle;
};
RunSeeds derive_seeds(std::uint64_t seed);

/// Trains on a fixed set of sampled triplets (or 2 x triplet_count pairs for
/// pair losses), reshuffled each epoch, with plain SGD.
TrainResult train(const RunConfig& config, const RawImageSet& data,
                  const StepObserver& observer = {});

/// Validates the config, loads the training files, trains, and writes
/// checkpoint.bin, loss_log.csv, epoch_log.csv and config.txt into
/// config.output_dir.
TrainResult run_training(const RunConfig& config);

}  // namespace fdl
