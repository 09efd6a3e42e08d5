#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "truematch/crosstab.hpp"

namespace truematch {

// Agreement indices on a matching table. Rand and adjusted Rand ignore
// label names; diagonal fraction and kappa depend on the matching.

inline double diagonal_fraction(const MatchingTable& t) {
  if (t.total() == 0) throw std::invalid_argument("diagonal_fraction: empty table");
  return static_cast<double>(t.trace()) / static_cast<double>(t.total());
}

// Cohen's kappa. Returns 1 when expected and observed agreement are both
// perfect, and NaN for the undefined case p_e = 1 with p_o < 1.
inline double cohen_kappa(const MatchingTable& t) {
  if (t.total() < 1) throw std::invalid_argument("cohen_kappa: empty table");
  const auto n = static_cast<double>(t.total());
  const double po = static_cast<double>(t.trace()) / n;
  double pe = 0.0;
  for (std::size_t k = 0; k < t.k(); ++k)
    pe += static_cast<double>(t.row_sums()[k]) * static_cast<double>(t.col_sums()[k]);
  pe /= n * n;
  if (pe >= 1.0) return po >= 1.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
  return (po - pe) / (1.0 - pe);
}

namespace detail {

// C(n, 2) exactly; fits in 64 bits for n well beyond 1e6.
constexpr std::int64_t choose2(std::int64_t n) noexcept { return n * (n - 1) / 2; }

struct PairSums {
  std::int64_t pairs = 0;  // C(N, 2)
  std::int64_t cells = 0;  // sum over cells of C(n_kl, 2)
  std::int64_t rows = 0;   // sum over rows of C(n_k, 2)
  std::int64_t cols = 0;   // sum over columns of C(n_l, 2)
};

inline PairSums pair_sums(const MatchingTable& t) {
  if (t.total() < 2) throw std::invalid_argument("pair-counting index needs N >= 2");
  PairSums s;
  s.pairs = choose2(t.total());
  for (std::size_t i = 0; i < t.k(); ++i) {
    s.rows += choose2(t.row_sums()[i]);
    s.cols += choose2(t.col_sums()[i]);
    for (std::size_t j = 0; j < t.k(); ++j) s.cells += choose2(t(i, j));
  }
  return s;
}

}  // namespace detail

inline double rand_index(const MatchingTable& t) {
  const auto s = detail::pair_sums(t);
  const std::int64_t agree = s.pairs + 2 * s.cells - s.rows - s.cols;
  return static_cast<double>(agree) / static_cast<double>(s.pairs);
}

// Hubert-Arabie adjusted Rand index; 0 when the denominator vanishes.
inline double adjusted_rand(const MatchingTable& t) {
  const auto s = detail::pair_sums(t);
  const double expected =
      static_cast<double>(s.rows) * static_cast<double>(s.cols) / static_cast<double>(s.pairs);
  const double max_index = 0.5 * static_cast<double>(s.rows + s.cols);
  const double denom = max_index - expected;
  if (denom == 0.0) return 0.0;
  return (static_cast<double>(s.cells) - expected) / denom;
}

struct AgreementStats {
  double diagonal = 0.0;
  double kappa = 0.0;
  double rand = 0.0;
  double crand = 0.0;
};

inline AgreementStats agreement(const MatchingTable& t) {
  return {diagonal_fraction(t), cohen_kappa(t), rand_index(t), adjusted_rand(t)};
}

}  // namespace truematch
