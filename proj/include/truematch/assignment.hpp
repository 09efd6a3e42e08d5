#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "truematch/matrix.hpp"
#include "truematch/permutation.hpp"

namespace truematch {

enum class Sense { minimize, maximize };

// Sum of score(k, perm[k]) over rows.
inline double assignment_value(const Matrix<double>& score, const Permutation& perm) {
  double v = 0.0;
  for (std::size_t k = 0; k < perm.size(); ++k) v += score(k, perm[k]);
  return v;
}

namespace detail {

inline void check_assignment_input(const Matrix<double>& score) {
  if (!score.square()) throw std::invalid_argument("assignment: score matrix must be square");
  for (double v : score.values())
    if (!std::isfinite(v)) throw std::invalid_argument("assignment: non-finite score");
}

}  // namespace detail

// Linear sum assignment by the Hungarian method with row potentials u and
// column potentials v (shortest augmenting path form, O(K^3)). Returns
// perm with perm[k] = column assigned to row k. Deterministic.
inline Permutation solve_assignment(const Matrix<double>& score, Sense sense) {
  detail::check_assignment_input(score);
  const std::size_t n = score.rows();
  if (n == 0) return Permutation{};

  const double sign = sense == Sense::minimize ? 1.0 : -1.0;
  const double inf = std::numeric_limits<double>::infinity();

  // 1-based arrays; column 0 is a virtual column used as augmentation root.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const std::size_t row0 = match[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double reduced = sign * score(row0 - 1, col - 1) - u[row0] - v[col];
        if (reduced < minv[col]) {
          minv[col] = reduced;
          way[col] = col0;
        }
        if (minv[col] < delta) {
          delta = minv[col];
          col1 = col;
        }
      }
      for (std::size_t col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<std::size_t> perm(n);
  for (std::size_t col = 1; col <= n; ++col) perm[match[col] - 1] = col - 1;
  return Permutation(std::move(perm));
}

constexpr std::size_t kBruteForceMaxK = 8;

// Exhaustive search over all K! permutations; ties go to the
// lexicographically smallest permutation.
inline Permutation brute_force_assignment(const Matrix<double>& score, Sense sense) {
  detail::check_assignment_input(score);
  const std::size_t n = score.rows();
  if (n > kBruteForceMaxK) throw std::invalid_argument("brute force assignment limited to K <= 8");

  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::vector<std::size_t> best = p;
  double best_value = sense == Sense::minimize ? std::numeric_limits<double>::infinity()
                                               : -std::numeric_limits<double>::infinity();
  do {
    double value = 0.0;
    for (std::size_t k = 0; k < n; ++k) value += score(k, p[k]);
    // next_permutation visits in lexicographic order, so strict improvement keeps the smallest
    const bool better = sense == Sense::minimize ? value < best_value : value > best_value;
    if (better) {
      best_value = value;
      best = p;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return Permutation(std::move(best));
}

}  // namespace truematch
