#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdl/backbone.hpp"
#include "fdl/losses.hpp"

namespace fdl {

enum class LossKind { triplet, contrastive, fdt, fdc };

std::string_view to_string(LossKind kind);
std::optional<LossKind> parse_loss_kind(std::string_view text);
bool is_pair_loss(LossKind kind);

/// Everything needed to reproduce a training run.
///
/// Keys (config file and CLI flags share the same kebab-case names):
///   loss, alpha, lambda, mu-w, mu-b, hidden, q, p, latent-activation,
///   batch-size, learning-rate, epochs, triplet-count, positive-fraction,
///   seed, train-images, train-labels, output-dir
struct RunConfig {
  LossKind loss = LossKind::fdt;
  double alpha = 0.25;
  double lambda = 0.1;
  double mu_w = 1e-4;
  double mu_b = 1e-4;
  std::vector<std::size_t> hidden = {512};
  std::size_t q = 300;
  std::size_t p = 128;
  Activation latent_activation = Activation::relu;
  std::size_t batch_size = 32;
  double learning_rate = 1e-5;
  std::size_t epochs = 50;
  std::size_t triplet_count = 500;
  double positive_fraction = 0.5;
  std::uint64_t seed = 42;
  std::filesystem::path train_images;
  std::filesystem::path train_labels;
  std::filesystem::path output_dir = "run";

  LossConfig loss_config() const;
  NetworkShape network_shape(std::size_t input_dim) const;

  /// Assigns one field from its textual form. Throws ConfigError naming the
  /// key for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);

  /// Every violated constraint, one message per field; empty when valid.
  std::vector<std::string> problems() const;
  /// Throws ConfigError listing all problems.
  void validate() const;

  /// key=value lines for every field, in a fixed order.
  std::string to_text() const;
};

/// Parses key=value lines; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Applies a key=value file on top of `config`.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

}  // namespace fdl
