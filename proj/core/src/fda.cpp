#include "fdl/fda.hpp"

#include <fstream>
#include <string>

#include <json.hpp>

#include "fdl/error.hpp"
#include "fdl/linalg.hpp"

namespace fdl {

FdaModel fda_fit(const Matrix& data, std::span<const int> labels, std::size_t p, double mu_w) {
  if (p == 0 || p > data.rows()) {
    throw ConfigError("fda_fit: p must lie in [1, " + std::to_string(data.rows()) + "], got " +
                      std::to_string(p));
  }
  if (!(mu_w >= 0.0)) throw ConfigError("fda_fit: mu_w must be >= 0");
  ScatterPair sp = classical_scatters(data, labels);
  for (std::size_t i = 0; i < sp.s_w.rows(); ++i) sp.s_w(i, i) += mu_w;
  sp.mu_w = mu_w;

  EigenDecomposition eig = generalized_eig(sp.s_b, sp.s_w);
  FdaModel model;
  model.mu_w = mu_w;
  model.projection = eig.vectors.column_block(0, p);
  model.eigenvalues.assign(eig.values.begin(), eig.values.begin() + static_cast<long>(p));
  return model;
}

Matrix fda_transform(const FdaModel& model, const Matrix& data) {
  if (data.rows() != model.projection.rows()) {
    throw DimensionError("fda_transform: data " + data.shape() + " does not match model of input "
                         "dimension " + std::to_string(model.projection.rows()));
  }
  return matmul_tn(model.projection, data);
}

void save_fda_model(const FdaModel& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["dim"] = model.projection.rows();
  j["p"] = model.projection.cols();
  j["mu_w"] = model.mu_w;
  j["eigenvalues"] = model.eigenvalues;
  auto rows = nlohmann::json::array();
  for (std::size_t r = 0; r < model.projection.rows(); ++r) {
    const auto row = model.projection.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["projection"] = std::move(rows);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open FDA model for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing FDA model: " + path.string());
}

FdaModel load_fda_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open FDA model: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    FdaModel model;
    const auto d = j.at("dim").get<std::size_t>();
    const auto p = j.at("p").get<std::size_t>();
    model.mu_w = j.at("mu_w").get<double>();
    model.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    model.projection = Matrix(d, p);
    const auto& rows = j.at("projection");
    if (rows.size() != d || model.eigenvalues.size() != p) {
      throw FormatError("FDA model dimensions disagree with its payload");
    }
    for (std::size_t r = 0; r < d; ++r) {
      const auto row = rows.at(r).get<std::vector<double>>();
      if (row.size() != p) throw FormatError("FDA model projection row has wrong length");
      for (std::size_t c = 0; c < p; ++c) model.projection(r, c) = row[c];
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed FDA model " + path.string() + ": " + e.what());
  }
}

}  // namespace fdl
