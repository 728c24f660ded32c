#include "fdl/sampling.hpp"

#include <map>
#include <string>

#include "fdl/error.hpp"
#include "fdl/random.hpp"

namespace fdl {
namespace {

// Per-class member lists, each sample's position within its class, and the
// complement of every class.
struct ClassIndex {
  std::map<int, std::vector<std::size_t>> members;
  std::map<int, std::vector<std::size_t>> others;
  std::vector<std::size_t> position;

  explicit ClassIndex(std::span<const int> labels) : position(labels.size()) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto& m = members[labels[i]];
      position[i] = m.size();
      m.push_back(i);
    }
    if (members.size() < 2) {
      throw ConfigError("sampling needs at least 2 classes, got " +
                        std::to_string(members.size()));
    }
    for (const auto& [label, idx] : members) {
      if (idx.size() < 2) {
        throw ConfigError("class " + std::to_string(label) + " has " +
                          std::to_string(idx.size()) + " sample(s); at least 2 are required");
      }
      auto& o = others[label];
      o.reserve(labels.size() - idx.size());
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != label) o.push_back(i);
      }
    }
  }

  std::size_t draw_neighbor(int label, std::size_t anchor, Rng& rng) const {
    const auto& m = members.at(label);
    const std::size_t r = static_cast<std::size_t>(rng.uniform_index(m.size() - 1));
    return m[r < position[anchor] ? r : r + 1];
  }

  std::size_t draw_distant(int label, Rng& rng) const {
    const auto& o = others.at(label);
    return o[static_cast<std::size_t>(rng.uniform_index(o.size()))];
  }
};

}  // namespace

TripletBatch TripletBatch::subset(std::span<const std::size_t> positions) const {
  TripletBatch out;
  for (std::size_t p : positions) {
    out.anchor.push_back(anchor.at(p));
    out.neighbor.push_back(neighbor.at(p));
    out.distant.push_back(distant.at(p));
  }
  return out;
}

PairBatch PairBatch::subset(std::span<const std::size_t> positions) const {
  PairBatch out;
  for (std::size_t p : positions) {
    out.first.push_back(first.at(p));
    out.second.push_back(second.at(p));
    out.y.push_back(y.at(p));
  }
  return out;
}

TripletBatch sample_triplets(std::span<const int> labels, std::size_t count, std::uint64_t seed) {
  const ClassIndex index(labels);
  Rng rng(seed);
  TripletBatch batch;
  batch.anchor.reserve(count);
  batch.neighbor.reserve(count);
  batch.distant.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t a = static_cast<std::size_t>(rng.uniform_index(labels.size()));
    const int label = labels[a];
    const std::size_t n = index.draw_neighbor(label, a, rng);
    const std::size_t d = index.draw_distant(label, rng);
    batch.anchor.push_back(a);
    batch.neighbor.push_back(n);
    batch.distant.push_back(d);
  }
  return batch;
}

PairBatch sample_pairs(std::span<const int> labels, std::size_t count, std::uint64_t seed,
                       double positive_fraction) {
  if (!(positive_fraction >= 0.0 && positive_fraction <= 1.0)) {
    throw ConfigError("positive_fraction must lie in [0, 1], got " +
                      std::to_string(positive_fraction));
  }
  const ClassIndex index(labels);
  Rng rng(seed);
  PairBatch batch;
  batch.first.reserve(count);
  batch.second.reserve(count);
  batch.y.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t a = static_cast<std::size_t>(rng.uniform_index(labels.size()));
    const int label = labels[a];
    const bool similar = rng.uniform01() < positive_fraction;
    batch.first.push_back(a);
    batch.second.push_back(similar ? index.draw_neighbor(label, a, rng)
                                   : index.draw_distant(label, rng));
    batch.y.push_back(similar ? 0 : 1);
  }
  return batch;
}

void check_triplets(const TripletBatch& batch, std::span<const int> labels) {
  if (batch.neighbor.size() != batch.size() || batch.distant.size() != batch.size()) {
    throw DimensionError("triplet index vectors differ in length");
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const std::size_t a = batch.anchor[i];
    const std::size_t n = batch.neighbor[i];
    const std::size_t d = batch.distant[i];
    if (a >= labels.size() || n >= labels.size() || d >= labels.size()) {
      throw ConfigError("triplet " + std::to_string(i) + " indexes past the dataset");
    }
    if (a == n || labels[a] != labels[n] || labels[a] == labels[d]) {
      throw ConfigError("triplet " + std::to_string(i) + " violates the label invariants");
    }
  }
}

void check_pairs(const PairBatch& batch, std::span<const int> labels) {
  if (batch.second.size() != batch.size() || batch.y.size() != batch.size()) {
    throw DimensionError("pair index vectors differ in length");
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const std::size_t a = batch.first[i];
    const std::size_t b = batch.second[i];
    if (a >= labels.size() || b >= labels.size()) {
      throw ConfigError("pair " + std::to_string(i) + " indexes past the dataset");
    }
    const bool same = labels[a] == labels[b];
    if (a == b || batch.y[i] > 1 || same != (batch.y[i] == 0)) {
      throw ConfigError("pair " + std::to_string(i) + " violates the label invariants");
    }
  }
}

}  // namespace fdl
