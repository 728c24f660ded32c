#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fdl/scatter.hpp"

namespace fdl {

/// Index triples into a dataset: anchor and neighbor share a label, distant
/// does not.
struct TripletBatch {
  std::vector<std::size_t> anchor;
  std::vector<std::size_t> neighbor;
  std::vector<std::size_t> distant;

  std::size_t size() const noexcept { return anchor.size(); }
  /// Entries at `positions`, in that order.
  TripletBatch subset(std::span<const std::size_t> positions) const;
};

/// Labeled index pairs: y = 0 for same-label pairs, 1 otherwise.
struct PairBatch {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
  PairLabels y;

  std::size_t size() const noexcept { return first.size(); }
  PairBatch subset(std::span<const std::size_t> positions) const;
};

/// `count` triplets: anchor uniform over all samples, neighbor uniform over the
/// anchor's class minus the anchor, distant uniform over all other classes.
/// Requires >= 2 classes and >= 2 samples in every class.
TripletBatch sample_triplets(std::span<const int> labels, std::size_t count, std::uint64_t seed);

/// `count` pairs: uniform first element; with probability positive_fraction
/// the second is a same-class sample (y = 0), otherwise a different-class one.
PairBatch sample_pairs(std::span<const int> labels, std::size_t count, std::uint64_t seed,
                       double positive_fraction = 0.5);

/// Throws ConfigError unless the triplet label invariants hold.
void check_triplets(const TripletBatch& batch, std::span<const int> labels);
/// Throws ConfigError unless the pair label invariants hold.
void check_pairs(const PairBatch& batch, std::span<const int> labels);

}  // namespace fdl
