#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace truematch {

// Bijection on {0..K-1}; map[k] is the image of k. Cluster labels are
// 1-based elsewhere, so label k maps to map[k-1] + 1.
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
    std::vector<bool> seen(map_.size(), false);
    for (auto v : map_) {
      if (v >= map_.size() || seen[v]) throw std::invalid_argument("permutation is not a bijection");
      seen[v] = true;
    }
  }

  static Permutation identity(std::size_t k) {
    std::vector<std::size_t> m(k);
    std::iota(m.begin(), m.end(), std::size_t{0});
    return Permutation(std::move(m));
  }

  std::size_t size() const noexcept { return map_.size(); }
  std::size_t operator[](std::size_t k) const { return map_.at(k); }
  const std::vector<std::size_t>& map() const noexcept { return map_; }

  Permutation inverse() const {
    std::vector<std::size_t> inv(map_.size());
    for (std::size_t k = 0; k < map_.size(); ++k) inv[map_[k]] = k;
    return Permutation(std::move(inv));
  }

  // (this ∘ other)(k) = this[other[k]]
  Permutation compose(const Permutation& other) const {
    if (other.size() != size()) throw std::invalid_argument("permutation size mismatch");
    std::vector<std::size_t> m(size());
    for (std::size_t k = 0; k < size(); ++k) m[k] = map_[other.map_[k]];
    return Permutation(std::move(m));
  }

  bool is_identity() const noexcept {
    for (std::size_t k = 0; k < map_.size(); ++k)
      if (map_[k] != k) return false;
    return true;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation& a, const Permutation& b) { return a.map_ <=> b.map_; }

 private:
  std::vector<std::size_t> map_;
};

}  // namespace truematch
