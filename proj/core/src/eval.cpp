#include "fdl/eval.hpp"

#include <limits>
#include <string>

#include "fdl/error.hpp"

namespace fdl {

std::vector<std::size_t> nearest_neighbors(const Matrix& reference, const Matrix& query,
                                           bool exclude_self) {
  if (reference.cols() == 0) throw DimensionError("1-NN search needs a non-empty reference set");
  if (reference.rows() != query.rows()) {
    throw DimensionError("1-NN search: reference " + reference.shape() + " and query " +
                         query.shape() + " differ in dimension");
  }
  if (exclude_self && reference.cols() < 2) {
    throw DimensionError("leave-one-out 1-NN needs at least 2 reference points");
  }
  // Column-major copies so each sample is contiguous.
  const Matrix ref_t = reference.transposed();
  const Matrix query_t = query.transposed();
  const std::size_t dim = reference.rows();

  std::vector<std::size_t> nearest(query.cols());
  for (std::size_t q = 0; q < query.cols(); ++q) {
    const double* qv = query_t.row(q).data();
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t r = 0; r < reference.cols(); ++r) {
      if (exclude_self && r == q) continue;
      const double* rv = ref_t.row(r).data();
      double dist = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = qv[k] - rv[k];
        dist += diff * diff;
      }
      if (dist < best) {
        best = dist;
        best_idx = r;
      }
    }
    nearest[q] = best_idx;
  }
  return nearest;
}

EvalReport one_nn_accuracy(const Matrix& reference, std::span<const int> reference_labels,
                           const Matrix& query, std::span<const int> query_labels,
                           bool exclude_self) {
  if (reference_labels.size() != reference.cols() || query_labels.size() != query.cols()) {
    throw DimensionError("1-NN search: label counts do not match embedding columns");
  }
  const auto nearest = nearest_neighbors(reference, query, exclude_self);
  EvalReport report;
  report.n_query = query.cols();
  report.n_reference = reference.cols();
  for (std::size_t q = 0; q < nearest.size(); ++q) {
    if (reference_labels[nearest[q]] == query_labels[q]) ++report.correct;
  }
  report.accuracy = report.n_query == 0 ? 0.0
                                        : static_cast<double>(report.correct) /
                                              static_cast<double>(report.n_query);
  return report;
}

}  // namespace fdl
