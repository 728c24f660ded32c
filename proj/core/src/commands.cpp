#include "fdl/commands.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "fdl/checkpoint.hpp"
#include "fdl/error.hpp"
#include "fdl/random.hpp"
#include "fdl/training.hpp"

namespace fdl {
namespace {

// Applies the chosen space to a dataset of pixel columns.
Matrix to_space(const std::string& space, const std::filesystem::path& checkpoint,
                const Matrix& pixels, const NetworkParams* params) {
  if (space == "pixels") return pixels;
  const auto parsed = parse_embedding_space(space);
  if (!parsed) throw ConfigError("space: expected latent|feature|pixels, got '" + space + "'");
  if (params == nullptr) throw ConfigError("checkpoint: required for space '" + space + "'");
  if (pixels.rows() != params->input_dim()) {
    throw DimensionError("data dimension " + std::to_string(pixels.rows()) + " does not match " +
                         checkpoint.string() + " input width " +
                         std::to_string(params->input_dim()));
  }
  return embed(*params, pixels, *parsed);
}

std::vector<std::size_t> first_n(std::size_t available, std::size_t requested) {
  const std::size_t n = requested == 0 ? available : std::min(available, requested);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

}  // namespace

EvalSplit make_eval_split(const RawImageSet& reference_set, const RawImageSet& query_set,
                          std::size_t reference_count, std::size_t query_count,
                          std::uint64_t reference_seed) {
  const std::size_t n_ref = reference_count == 0 ? reference_set.count
                                                 : std::min(reference_count, reference_set.count);
  const auto ref_idx = sample_without_replacement(reference_set.count, n_ref, reference_seed);
  EvalSplit split;
  split.reference = reference_set.gather(ref_idx);
  split.query = query_set.gather(first_n(query_set.count, query_count));
  return split;
}

EvalReport run_eval(const EvalOptions& options) {
  std::optional<NetworkParams> params;
  if (options.space != "pixels") {
    if (options.checkpoint.empty()) {
      throw ConfigError("checkpoint: required for space '" + options.space + "'");
    }
    params = load_checkpoint(options.checkpoint);
  }
  const NetworkParams* net = params ? &*params : nullptr;

  const RawImageSet query_set = load_idx_raw(options.query_images, options.query_labels);
  EvalReport report;
  if (options.leave_one_out) {
    const LabeledDataset query = query_set.gather(first_n(query_set.count, options.query_count));
    const Matrix emb = to_space(options.space, options.checkpoint, query.data, net);
    report = one_nn_accuracy(emb, query.labels, emb, query.labels, true);
  } else {
    const RawImageSet ref_set = load_idx_raw(options.reference_images, options.reference_labels);
    const EvalSplit split = make_eval_split(ref_set, query_set, options.reference_count,
                                            options.query_count, options.reference_seed);
    const Matrix ref = to_space(options.space, options.checkpoint, split.reference.data, net);
    const Matrix query = to_space(options.space, options.checkpoint, split.query.data, net);
    report = one_nn_accuracy(ref, split.reference.labels, query, split.query.labels);
  }

  if (!options.output_json.empty()) {
    nlohmann::json j;
    j["accuracy"] = report.accuracy;
    j["n_query"] = report.n_query;
    j["n_reference"] = report.n_reference;
    j["space"] = options.space;
    std::ofstream out(options.output_json, std::ios::trunc);
    if (!out) throw IoError("cannot write " + options.output_json.string());
    out << j.dump(2) << '\n';
  }
  return report;
}

std::size_t run_export(const ExportOptions& options) {
  const RawImageSet set = load_idx_raw(options.images, options.labels);
  const LabeledDataset data = set.gather(first_n(set.count, options.limit));
  std::optional<NetworkParams> params;
  if (options.space != "pixels") params = load_checkpoint(options.checkpoint);
  const Matrix emb =
      to_space(options.space, options.checkpoint, data.data, params ? &*params : nullptr);
  export_embeddings(emb, data.labels, options.output_csv);
  return emb.cols();
}

LabeledDataset two_gaussians(std::size_t dim, std::size_t count_per_class, double separation,
                             std::uint64_t seed) {
  if (dim == 0) throw ConfigError("dim: must be >= 1");
  std::vector<std::vector<double>> means(2, std::vector<double>(dim, 0.0));
  means[1][0] = separation;
  const std::vector<Matrix> covs(2, Matrix::identity(dim));
  const std::vector<std::size_t> counts(2, count_per_class);
  return synthetic_gaussians(means, covs, counts, seed);
}

FdaRunResult run_fda(const FdaOptions& options) {
  LabeledDataset data;
  if (options.images.empty()) {
    data = two_gaussians(options.dim, options.count_per_class, options.separation, options.seed);
  } else {
    const RawImageSet set = load_idx_raw(options.images, options.labels);
    data = set.gather(first_n(set.count, options.limit));
  }

  FdaRunResult result;
  result.model = fda_fit(data.data, data.labels, options.p, options.mu_w);
  result.projected = fda_transform(result.model, data.data);
  result.projected_one_nn =
      one_nn_accuracy(result.projected, data.labels, result.projected, data.labels, true);

  if (!options.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(options.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + options.output_dir.string());
    save_fda_model(result.model, options.output_dir / "fda_model.json");
    export_embeddings(result.projected, data.labels, options.output_dir / "projected.csv");
  }
  return result;
}

}  // namespace fdl
