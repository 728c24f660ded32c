#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fdl/matrix.hpp"

namespace fdl {

struct EvalReport {
  double accuracy = 0.0;  ///< correct / n_query
  std::size_t correct = 0;
  std::size_t n_query = 0;
  std::size_t n_reference = 0;
};

/// Index of the nearest reference column (squared Euclidean) for every query
/// column; ties go to the lowest reference index. With exclude_self, query i
/// may not match reference i (leave-one-out when both sets are the same array).
std::vector<std::size_t> nearest_neighbors(const Matrix& reference, const Matrix& query,
                                           bool exclude_self = false);

/// 1-NN classification accuracy of `query` against `reference`.
EvalReport one_nn_accuracy(const Matrix& reference, std::span<const int> reference_labels,
                           const Matrix& query, std::span<const int> query_labels,
                           bool exclude_self = false);

}  // namespace fdl
