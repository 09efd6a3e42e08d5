#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "truematch/labels.hpp"
#include "truematch/matrix.hpp"
#include "truematch/permutation.hpp"

namespace truematch {

using Count = std::int64_t;

// K x K contingency counts with marginals. Rows index the first solution,
// columns the second.
class MatchingTable {
 public:
  MatchingTable() = default;

  explicit MatchingTable(Matrix<Count> counts) : counts_(std::move(counts)) {
    if (!counts_.square() || counts_.rows() == 0)
      throw std::invalid_argument("matching table must be square with K >= 1");
    const auto k = counts_.rows();
    row_sums_.assign(k, 0);
    col_sums_.assign(k, 0);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = 0; c < k; ++c) {
        const Count n = counts_(r, c);
        if (n < 0) throw std::invalid_argument("negative count in matching table");
        row_sums_[r] += n;
        col_sums_[c] += n;
        total_ += n;
      }
  }

  std::size_t k() const noexcept { return counts_.rows(); }
  Count total() const noexcept { return total_; }
  Count operator()(std::size_t r, std::size_t c) const noexcept { return counts_(r, c); }
  const Matrix<Count>& counts() const noexcept { return counts_; }
  const std::vector<Count>& row_sums() const noexcept { return row_sums_; }
  const std::vector<Count>& col_sums() const noexcept { return col_sums_; }

  Count trace() const noexcept {
    Count t = 0;
    for (std::size_t i = 0; i < k(); ++i) t += counts_(i, i);
    return t;
  }

  // Table with rows reordered by row_order and columns by col_order:
  // result(i, j) = this(row_order[i], col_order[j]).
  MatchingTable reordered(const std::vector<std::size_t>& row_order,
                          const std::vector<std::size_t>& col_order) const {
    Matrix<Count> m(k(), k());
    for (std::size_t i = 0; i < k(); ++i)
      for (std::size_t j = 0; j < k(); ++j) m(i, j) = counts_(row_order.at(i), col_order.at(j));
    return MatchingTable(std::move(m));
  }

  friend bool operator==(const MatchingTable& a, const MatchingTable& b) {
    return a.counts_ == b.counts_;
  }

 private:
  Matrix<Count> counts_;
  std::vector<Count> row_sums_;
  std::vector<Count> col_sums_;
  Count total_ = 0;
};

// counts(k, l) = #{i : a_i = k+1 and b_i = l+1}. Labels above the range in
// use leave all-zero padding rows/columns.
inline MatchingTable crosstab(const LabelVector& a, const LabelVector& b, int k) {
  if (a.size() != b.size())
    throw std::invalid_argument("crosstab: label vectors differ in length (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  if (k < 1 || a.k() > k || b.k() > k) throw std::invalid_argument("crosstab: label out of range");
  const auto kk = static_cast<std::size_t>(k);
  Matrix<Count> m(kk, kk, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    ++m(static_cast<std::size_t>(a[i] - 1), static_cast<std::size_t>(b[i] - 1));
  return MatchingTable(std::move(m));
}

inline MatchingTable crosstab(const LabelVector& a, const LabelVector& b) {
  return crosstab(a, b, std::max(a.k(), b.k()));
}

// Expected counts under independence, normalized squared deviations, and
// the same deviations carrying the sign of (observed - expected).
struct ResidualMatrix {
  Matrix<double> expected;
  Matrix<double> dev;
  Matrix<double> signed_dev;
  double chi2 = 0.0;
};

namespace detail {

// Per-cell signed deviation. Cells with a zero marginal are defined as 0.
inline double signed_deviation(Count n, Count row_sum, Count col_sum, Count total,
                               double* expected_out = nullptr, double* dev_out = nullptr) {
  // integral product first so that symmetric cells produce bit-identical values
  const double expected = static_cast<double>(row_sum * col_sum) / static_cast<double>(total);
  if (expected_out) *expected_out = expected;
  if (expected == 0.0) {
    if (dev_out) *dev_out = 0.0;
    return 0.0;
  }
  const double diff = static_cast<double>(n) - expected;
  const double dev = diff * diff / expected;
  if (dev_out) *dev_out = dev;
  return diff > 0 ? dev : (diff < 0 ? -dev : 0.0);
}

}  // namespace detail

inline ResidualMatrix residuals(const MatchingTable& t) {
  if (t.total() < 1) throw std::invalid_argument("residuals: empty matching table");
  const auto k = t.k();
  ResidualMatrix r{Matrix<double>(k, k), Matrix<double>(k, k), Matrix<double>(k, k), 0.0};
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double e = 0, d = 0;
      r.signed_dev(i, j) =
          detail::signed_deviation(t(i, j), t.row_sums()[i], t.col_sums()[j], t.total(), &e, &d);
      r.expected(i, j) = e;
      r.dev(i, j) = d;
      r.chi2 += d;
    }
  return r;
}

}  // namespace truematch
