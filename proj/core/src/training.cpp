#include "fdl/training.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>

#include "fdl/checkpoint.hpp"
#include "fdl/error.hpp"
#include "fdl/linalg.hpp"
#include "fdl/random.hpp"

namespace fdl {
namespace {

constexpr std::size_t kLogFlushInterval = 50;

// Column-wise concatenation of equally tall blocks.
Matrix stack(std::initializer_list<const Matrix*> blocks) {
  const std::size_t rows = (*blocks.begin())->rows();
  std::size_t cols = 0;
  for (const Matrix* m : blocks) {
    if (m->rows() != rows) {
      throw DimensionError("branch inputs differ in height: " + m->shape() + " vs " +
                           std::to_string(rows) + " rows");
    }
    if (m->cols() != (*blocks.begin())->cols()) {
      throw DimensionError("branch batches differ in size: " + m->shape() + " vs " +
                           (*blocks.begin())->shape());
    }
    cols += m->cols();
  }
  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto dst = out.row(r).begin();
    for (const Matrix* m : blocks) dst = std::copy(m->row(r).begin(), m->row(r).end(), dst);
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(EmbeddingSpace space) {
  return space == EmbeddingSpace::latent ? "latent" : "feature";
}

std::optional<EmbeddingSpace> parse_embedding_space(std::string_view text) {
  if (text == "latent") return EmbeddingSpace::latent;
  if (text == "feature") return EmbeddingSpace::feature;
  return std::nullopt;
}

Matrix embed(const NetworkParams& params, const Matrix& inputs, EmbeddingSpace space,
             std::size_t chunk) {
  const std::size_t out_dim =
      space == EmbeddingSpace::latent ? params.latent_dim() : params.feature_dim();
  Matrix out(out_dim, inputs.cols());
  chunk = std::max<std::size_t>(chunk, 1);
  for (std::size_t first = 0; first < inputs.cols(); first += chunk) {
    const std::size_t count = std::min(chunk, inputs.cols() - first);
    const ForwardTrace trace = forward(params, inputs.column_block(first, count));
    const Matrix& emb = space == EmbeddingSpace::latent ? trace.latent() : trace.features;
    for (std::size_t r = 0; r < out_dim; ++r) {
      std::copy(emb.row(r).begin(), emb.row(r).end(), out.row(r).begin() + first);
    }
  }
  return out;
}

StepResult triplet_step(const NetworkParams& params, LossKind kind, const LossConfig& cfg,
                        const Matrix& x_anchor, const Matrix& x_neighbor,
                        const Matrix& x_distant) {
  const std::size_t b = x_anchor.cols();
  const ForwardTrace trace = forward(params, stack({&x_anchor, &x_neighbor, &x_distant}));
  StepResult result;
  switch (kind) {
    case LossKind::triplet: {
      const Matrix& f = trace.features;
      const TripletLossOutput out = triplet_loss(f.column_block(0, b), f.column_block(b, b),
                                                 f.column_block(2 * b, b), cfg.alpha);
      result.loss = out.value;
      result.active_fraction = out.active_fraction;
      const Matrix grad_f = stack({&out.grad_anchor, &out.grad_neighbor, &out.grad_distant});
      result.grads = backward_features(params, trace, grad_f);
      break;
    }
    case LossKind::fdt: {
      const Matrix& o = trace.latent();
      const EmbeddedTripletBatch batch{o.column_block(0, b), o.column_block(b, b),
                                       o.column_block(2 * b, b)};
      const TripletLossOutput out = fdt_loss(batch, params.projection, cfg);
      result.loss = out.value;
      result.active_fraction = out.active_fraction;
      const Matrix grad_o = stack({&out.grad_anchor, &out.grad_neighbor, &out.grad_distant});
      result.grads = backward(params, trace, grad_o, out.grad_u);
      break;
    }
    default:
      throw ConfigError("triplet_step: loss '" + std::string(to_string(kind)) +
                        "' is a pair loss");
  }
  return result;
}

StepResult pair_step(const NetworkParams& params, LossKind kind, const LossConfig& cfg,
                     const Matrix& x_first, const Matrix& x_second, const PairLabels& y) {
  const std::size_t b = x_first.cols();
  const ForwardTrace trace = forward(params, stack({&x_first, &x_second}));
  StepResult result;
  switch (kind) {
    case LossKind::contrastive: {
      const Matrix& f = trace.features;
      const PairLossOutput out =
          contrastive_loss(f.column_block(0, b), f.column_block(b, b), y, cfg.alpha);
      result.loss = out.value;
      result.active_fraction = out.active_fraction;
      result.grads = backward_features(params, trace, stack({&out.grad_first, &out.grad_second}));
      break;
    }
    case LossKind::fdc: {
      const Matrix& o = trace.latent();
      const EmbeddedPairBatch batch{o.column_block(0, b), o.column_block(b, b), y};
      const PairLossOutput out = fdc_loss(batch, params.projection, cfg);
      result.loss = out.value;
      result.active_fraction = out.active_fraction;
      result.grads =
          backward(params, trace, stack({&out.grad_first, &out.grad_second}), out.grad_u);
      break;
    }
    default:
      throw ConfigError("pair_step: loss '" + std::string(to_string(kind)) +
                        "' is a triplet loss");
  }
  return result;
}

RunSeeds derive_seeds(std::uint64_t seed) {
  std::uint64_t state = seed;
  RunSeeds s{};
  s.init = splitmix64(state);
  s.sampling = splitmix64(state);
  s.shuffle = splitmix64(state);
  return s;
}

TrainResult train(const RunConfig& config, const RawImageSet& data, const StepObserver& observer) {
  config.loss_config().validate();
  const RunSeeds seeds = derive_seeds(config.seed);
  const LossConfig loss_cfg = config.loss_config();
  const bool pairs = is_pair_loss(config.loss);

  TrainResult result;
  result.params = init_params(config.network_shape(data.pixel_count()), seeds.init);

  TripletBatch triplets;
  PairBatch pair_set;
  std::size_t set_size = 0;
  if (pairs) {
    pair_set = sample_pairs(data.labels, 2 * config.triplet_count, seeds.sampling,
                            config.positive_fraction);
    set_size = pair_set.size();
  } else {
    triplets = sample_triplets(data.labels, config.triplet_count, seeds.sampling);
    set_size = triplets.size();
  }

  Rng shuffle_rng(seeds.shuffle);
  std::vector<std::size_t> order(set_size);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double epoch_total = 0.0;
    std::size_t epoch_steps = 0;
    for (std::size_t first = 0; first < set_size; first += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, set_size - first);
      const std::span<const std::size_t> positions(order.data() + first, count);
      StepResult sr;
      if (pairs) {
        const PairBatch batch = pair_set.subset(positions);
        sr = pair_step(result.params, config.loss, loss_cfg, data.gather(batch.first).data,
                       data.gather(batch.second).data, batch.y);
      } else {
        const TripletBatch batch = triplets.subset(positions);
        sr = triplet_step(result.params, config.loss, loss_cfg, data.gather(batch.anchor).data,
                          data.gather(batch.neighbor).data, data.gather(batch.distant).data);
      }
      result.params = sgd_step(result.params, sr.grads.params, config.learning_rate);
      StepRecord rec{step, epoch, sr.loss, sr.active_fraction};
      result.steps.push_back(rec);
      if (observer) observer(rec);
      epoch_total += sr.loss;
      ++epoch_steps;
      ++step;
    }
    result.epoch_mean_loss.push_back(epoch_steps == 0 ? 0.0
                                                      : epoch_total / static_cast<double>(epoch_steps));
  }
  return result;
}

TrainResult run_training(const RunConfig& config) {
  config.validate();
  const RawImageSet data = load_idx_raw(config.train_images, config.train_labels);

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.output_dir.string());

  {
    std::ofstream echo(config.output_dir / "config.txt", std::ios::trunc);
    if (!echo) throw IoError("cannot write " + (config.output_dir / "config.txt").string());
    echo << config.to_text();
  }

  const auto log_path = config.output_dir / "loss_log.csv";
  std::ofstream log(log_path, std::ios::trunc);
  if (!log) throw IoError("cannot write " + log_path.string());
  log << "step,loss,hinge_active_fraction\n";
  const TrainResult result = train(config, data, [&log](const StepRecord& rec) {
    log << rec.step << ',' << format_double(rec.loss) << ',' << format_double(rec.active_fraction)
        << '\n';
    if ((rec.step + 1) % kLogFlushInterval == 0) log.flush();
  });
  log.flush();
  if (!log) throw IoError("failed writing " + log_path.string());

  const auto epoch_path = config.output_dir / "epoch_log.csv";
  std::ofstream epochs(epoch_path, std::ios::trunc);
  if (!epochs) throw IoError("cannot write " + epoch_path.string());
  epochs << "epoch,mean_loss\n";
  for (std::size_t e = 0; e < result.epoch_mean_loss.size(); ++e) {
    epochs << e << ',' << format_double(result.epoch_mean_loss[e]) << '\n';
  }

  save_checkpoint(result.params, config.output_dir / "checkpoint.bin");
  return result;
}

}  // namespace fdl
