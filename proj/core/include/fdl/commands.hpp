#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "fdl/data_io.hpp"
#include "fdl/eval.hpp"
#include "fdl/fda.hpp"

namespace fdl {

/// Reference/query split used for 1-NN evaluation: a seeded sample of
/// `reference_count` images from the reference set and the first
/// `query_count` images of the query set (0 means "all").
struct EvalSplit {
  LabeledDataset reference;
  LabeledDataset query;
};

EvalSplit make_eval_split(const RawImageSet& reference_set, const RawImageSet& query_set,
                          std::size_t reference_count, std::size_t query_count,
                          std::uint64_t reference_seed);

struct EvalOptions {
  std::filesystem::path checkpoint;  ///< unused for the "pixels" space
  std::filesystem::path reference_images;
  std::filesystem::path reference_labels;
  std::filesystem::path query_images;
  std::filesystem::path query_labels;
  std::size_t reference_count = 2000;
  std::size_t query_count = 1000;
  std::uint64_t reference_seed = 42;
  std::string space = "feature";  ///< latent | feature | pixels
  bool leave_one_out = false;     ///< score the query set against itself
  std::filesystem::path output_json;
};

/// Embeds both sets in the chosen space, runs 1-NN, and writes
/// {accuracy, n_query, n_reference, space} to output_json when set.
EvalReport run_eval(const EvalOptions& options);

struct ExportOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path images;
  std::filesystem::path labels;
  std::string space = "feature";
  std::size_t limit = 0;  ///< first N images; 0 means all
  std::filesystem::path output_csv;
};

/// Embeds a dataset and writes it with export_embeddings. Returns the row count.
std::size_t run_export(const ExportOptions& options);

struct FdaOptions {
  std::filesystem::path images;  ///< empty selects the synthetic generator
  std::filesystem::path labels;
  std::size_t limit = 0;
  // Synthetic two-class data: N(0, I) and N(separation * e_0, I) in `dim`
  // dimensions, `count_per_class` samples each.
  std::size_t dim = 2;
  std::size_t count_per_class = 100;
  double separation = 6.0;
  std::uint64_t seed = 42;
  std::size_t p = 1;
  double mu_w = 1e-4;
  std::filesystem::path output_dir;
};

struct FdaRunResult {
  FdaModel model;
  Matrix projected;
  /// Leave-one-out 1-NN accuracy in the projected space.
  EvalReport projected_one_nn;
};

/// Fits FDA, writes fda_model.json and projected.csv into output_dir.
FdaRunResult run_fda(const FdaOptions& options);

/// Two isotropic unit-variance Gaussians, the second shifted by
/// `separation` along axis 0.
LabeledDataset two_gaussians(std::size_t dim, std::size_t count_per_class, double separation,
                             std::uint64_t seed);

}  // namespace fdl
