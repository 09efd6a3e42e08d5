#pragma once

#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "truematch/labels.hpp"
#include "truematch/random.hpp"

namespace truematch {

// Base clusterers that ignore the data and hand out partitions of a known
// shape, under freshly shuffled label names on every fit. They model
// "random" and "justified" cluster solutions for MMCC experiments. The data
// argument only supplies the number of cases.

// Random partition of all cases into groups of the given sizes.
class RandomPartitionClusterer {
 public:
  using Model = LabelVector;

  explicit RandomPartitionClusterer(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {}

  template <class Data>
  LabelVector fit(const Data& data, std::span<const std::size_t>, int k, Rng& rng) const {
    const std::size_t n = std::size(data);
    if (std::accumulate(sizes_.begin(), sizes_.end(), std::size_t{0}) != n)
      throw std::invalid_argument("random partition sizes do not sum to N");
    if (sizes_.size() > static_cast<std::size_t>(k)) throw std::invalid_argument("more groups than K");
    const auto order = random_permutation(n, rng);
    const auto names = random_permutation(static_cast<std::size_t>(k), rng);
    std::vector<Label> labels(n);
    std::size_t pos = 0;
    for (std::size_t g = 0; g < sizes_.size(); ++g)
      for (std::size_t j = 0; j < sizes_[g]; ++j) labels[order[pos++]] = static_cast<Label>(names[g] + 1);
    return LabelVector(std::move(labels), k);
  }

  template <class Data>
  LabelVector predict(const LabelVector& model, const Data&) const {
    return model;
  }

 private:
  std::vector<std::size_t> sizes_;
};

// The first `fixed` cases always form one group (a justified cluster); the
// remaining cases are split at random into groups of the given sizes.
class PlantedPartitionClusterer {
 public:
  using Model = LabelVector;

  PlantedPartitionClusterer(std::size_t fixed, std::vector<std::size_t> random_sizes)
      : fixed_(fixed), sizes_(std::move(random_sizes)) {}

  template <class Data>
  LabelVector fit(const Data& data, std::span<const std::size_t>, int k, Rng& rng) const {
    const std::size_t n = std::size(data);
    if (fixed_ + std::accumulate(sizes_.begin(), sizes_.end(), std::size_t{0}) != n)
      throw std::invalid_argument("planted partition sizes do not sum to N");
    if (sizes_.size() + 1 > static_cast<std::size_t>(k)) throw std::invalid_argument("more groups than K");
    const auto names = random_permutation(static_cast<std::size_t>(k), rng);
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < fixed_; ++i) labels[i] = static_cast<Label>(names[0] + 1);
    const auto order = random_permutation(n - fixed_, rng);
    std::size_t pos = 0;
    for (std::size_t g = 0; g < sizes_.size(); ++g)
      for (std::size_t j = 0; j < sizes_[g]; ++j)
        labels[fixed_ + order[pos++]] = static_cast<Label>(names[g + 1] + 1);
    return LabelVector(std::move(labels), k);
  }

  template <class Data>
  LabelVector predict(const LabelVector& model, const Data&) const {
    return model;
  }

 private:
  std::size_t fixed_;
  std::vector<std::size_t> sizes_;
};

}  // namespace truematch
