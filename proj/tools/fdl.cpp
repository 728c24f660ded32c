// fdl: train, evaluate and export Siamese embeddings with Fisher
// discriminant losses, and run the classical FDA baseline.

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "fdl/commands.hpp"
#include "fdl/error.hpp"
#include "fdl/run_config.hpp"
#include "fdl/training.hpp"

namespace {

// Flag values for train are collected as strings and applied through
// RunConfig::set, so flags and config files share one parser.
struct TrainFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
};

void add_train_flag(CLI::App* cmd, TrainFlags& flags, const std::string& key,
                    const std::string& help) {
  cmd->add_option_function<std::string>(
      "--" + key, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
}

int run_train(const TrainFlags& flags) {
  fdl::RunConfig config;
  if (!flags.config_file.empty()) fdl::apply_config_file(config, flags.config_file);
  for (const auto& [key, value] : flags.values) config.set(key, value);
  config.validate();

  std::cout << "training loss=" << fdl::to_string(config.loss) << " epochs=" << config.epochs
            << " triplets=" << config.triplet_count << " seed=" << config.seed << '\n';
  const fdl::TrainResult result = fdl::run_training(config);
  for (std::size_t e = 0; e < result.epoch_mean_loss.size(); ++e) {
    if (e == 0 || e + 1 == result.epoch_mean_loss.size() || (e + 1) % 10 == 0) {
      std::printf("epoch %zu mean loss %.6g\n", e + 1, result.epoch_mean_loss[e]);
    }
  }
  std::cout << "wrote " << (config.output_dir / "checkpoint.bin").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisher discriminant triplet/contrastive losses for Siamese networks"};
  app.require_subcommand(1);

  // train
  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "train a Siamese backbone");
  train->add_option("--config", train_flags.config_file, "key=value config file");
  add_train_flag(train, train_flags, "loss", "triplet | contrastive | fdt | fdc");
  add_train_flag(train, train_flags, "alpha", "margin (default 0.25)");
  add_train_flag(train, train_flags, "lambda", "inter-class weight in (0,1) (default 0.1)");
  add_train_flag(train, train_flags, "mu-w", "intra-class diagonal strengthening (default 1e-4)");
  add_train_flag(train, train_flags, "mu-b", "inter-class diagonal strengthening (default 1e-4)");
  add_train_flag(train, train_flags, "hidden", "comma-separated hidden widths (default 512)");
  add_train_flag(train, train_flags, "q", "latent dimension (default 300)");
  add_train_flag(train, train_flags, "p", "feature dimension (default 128)");
  add_train_flag(train, train_flags, "latent-activation", "relu | linear (default relu)");
  add_train_flag(train, train_flags, "batch-size", "mini-batch size (default 32)");
  add_train_flag(train, train_flags, "learning-rate", "SGD step size (default 1e-5)");
  add_train_flag(train, train_flags, "epochs", "passes over the fixed set (default 50)");
  add_train_flag(train, train_flags, "triplet-count", "size of the fixed triplet set (default 500)");
  add_train_flag(train, train_flags, "positive-fraction",
                 "share of same-class pairs for pair losses (default 0.5)");
  add_train_flag(train, train_flags, "seed", "random seed (default 42)");
  add_train_flag(train, train_flags, "train-images", "IDX image file (.gz accepted)");
  add_train_flag(train, train_flags, "train-labels", "IDX label file (.gz accepted)");
  add_train_flag(train, train_flags, "output-dir", "directory for checkpoint and logs");

  // eval
  fdl::EvalOptions eval_opts;
  auto* eval = app.add_subcommand("eval", "1-NN accuracy of embedded query images");
  eval->add_option("--checkpoint", eval_opts.checkpoint, "checkpoint written by train");
  eval->add_option("--reference-images", eval_opts.reference_images, "reference IDX images");
  eval->add_option("--reference-labels", eval_opts.reference_labels, "reference IDX labels");
  eval->add_option("--query-images", eval_opts.query_images, "query IDX images")->required();
  eval->add_option("--query-labels", eval_opts.query_labels, "query IDX labels")->required();
  eval->add_option("--reference-count", eval_opts.reference_count,
                   "seeded reference sample size, 0 = all (default 2000)");
  eval->add_option("--query-count", eval_opts.query_count,
                   "leading query images used, 0 = all (default 1000)");
  eval->add_option("--reference-seed", eval_opts.reference_seed, "reference sampling seed");
  eval->add_option("--space", eval_opts.space, "latent | feature | pixels")
      ->check(CLI::IsMember({"latent", "feature", "pixels"}));
  eval->add_flag("--leave-one-out", eval_opts.leave_one_out,
                 "score the query set against itself, excluding self-matches");
  eval->add_option("--out", eval_opts.output_json, "JSON report path");

  // export
  fdl::ExportOptions export_opts;
  auto* exp = app.add_subcommand("export", "write embeddings as CSV");
  exp->add_option("--checkpoint", export_opts.checkpoint, "checkpoint written by train");
  exp->add_option("--images", export_opts.images, "IDX images")->required();
  exp->add_option("--labels", export_opts.labels, "IDX labels")->required();
  exp->add_option("--space", export_opts.space, "latent | feature | pixels")
      ->check(CLI::IsMember({"latent", "feature", "pixels"}));
  exp->add_option("--limit", export_opts.limit, "leading images exported, 0 = all");
  exp->add_option("--out", export_opts.output_csv, "CSV path")->required();

  // fda
  fdl::FdaOptions fda_opts;
  auto* fda = app.add_subcommand("fda", "classical Fisher discriminant analysis baseline");
  fda->add_option("--images", fda_opts.images, "IDX images (omit for synthetic data)");
  fda->add_option("--labels", fda_opts.labels, "IDX labels");
  fda->add_option("--limit", fda_opts.limit, "leading images used, 0 = all");
  fda->add_option("--dim", fda_opts.dim, "synthetic dimension (default 2)");
  fda->add_option("--count", fda_opts.count_per_class, "synthetic samples per class");
  fda->add_option("--separation", fda_opts.separation, "synthetic class separation along axis 0");
  fda->add_option("--seed", fda_opts.seed, "synthetic generator seed");
  fda->add_option("--p", fda_opts.p, "subspace dimension (default 1)");
  fda->add_option("--mu-w", fda_opts.mu_w, "intra-class diagonal strengthening");
  fda->add_option("--out", fda_opts.output_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return run_train(train_flags);
    if (eval->parsed()) {
      if (!eval_opts.leave_one_out &&
          (eval_opts.reference_images.empty() || eval_opts.reference_labels.empty())) {
        throw fdl::ConfigError(
            "reference-images/reference-labels: required unless --leave-one-out is given");
      }
      const fdl::EvalReport r = fdl::run_eval(eval_opts);
      std::printf("space=%s accuracy=%.4f n_query=%zu n_reference=%zu\n", eval_opts.space.c_str(),
                  r.accuracy, r.n_query, r.n_reference);
      return 0;
    }
    if (exp->parsed()) {
      const std::size_t rows = fdl::run_export(export_opts);
      std::printf("wrote %zu rows to %s\n", rows, export_opts.output_csv.c_str());
      return 0;
    }
    if (fda->parsed()) {
      if (fda_opts.images.empty() != fda_opts.labels.empty()) {
        throw fdl::ConfigError("images/labels: give both or neither");
      }
      const fdl::FdaRunResult r = fdl::run_fda(fda_opts);
      std::printf("p=%zu top eigenvalue=%.6g projected leave-one-out 1-NN accuracy=%.4f\n",
                  r.model.projection.cols(), r.model.eigenvalues.front(),
                  r.projected_one_nn.accuracy);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
