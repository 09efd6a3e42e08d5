#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "truematch/labels.hpp"
#include "truematch/matrix.hpp"
#include "truematch/random.hpp"

namespace truematch {

// k-means by Lloyd iterations, usable as an MMCC base clusterer. Data is an
// N x D matrix of features; fit sees only the resampled rows, predict
// assigns every row to its nearest centroid.
class LloydClusterer {
 public:
  using Model = Matrix<double>;  // K x D centroids

  explicit LloydClusterer(std::size_t iterations = 100) : iterations_(iterations) {}

  Model fit(const Matrix<double>& data, std::span<const std::size_t> resample, int k, Rng& rng) const {
    if (k < 1) throw std::invalid_argument("lloyd: need K >= 1");
    const auto kk = static_cast<std::size_t>(k);
    const auto dims = data.cols();

    // distinct resampled points, sorted by coordinates
    std::vector<std::size_t> distinct(resample.begin(), resample.end());
    auto row_less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(data.row(a).begin(), data.row(a).end(),
                                          data.row(b).begin(), data.row(b).end());
    };
    auto row_equal = [&](std::size_t a, std::size_t b) {
      return std::equal(data.row(a).begin(), data.row(a).end(), data.row(b).begin());
    };
    std::sort(distinct.begin(), distinct.end(),
              [&](std::size_t a, std::size_t b) { return row_less(a, b) || (!row_less(b, a) && a < b); });
    distinct.erase(std::unique(distinct.begin(), distinct.end(), row_equal), distinct.end());
    if (distinct.size() < kk) throw std::invalid_argument("lloyd: K exceeds distinct points in resample");

    shuffle(std::span<std::size_t>(distinct), rng);
    Model centroids(kk, dims);
    for (std::size_t c = 0; c < kk; ++c)
      std::copy(data.row(distinct[c]).begin(), data.row(distinct[c]).end(), centroids.row(c).begin());

    std::vector<std::size_t> assign(resample.size(), kk);
    for (std::size_t it = 0; it < iterations_; ++it) {
      bool changed = false;
      for (std::size_t j = 0; j < resample.size(); ++j) {
        const auto c = nearest(centroids, data.row(resample[j]));
        if (c != assign[j]) {
          assign[j] = c;
          changed = true;
        }
      }
      if (!changed) break;

      Matrix<double> sums(kk, dims, 0.0);
      std::vector<std::size_t> sizes(kk, 0);
      for (std::size_t j = 0; j < resample.size(); ++j) {
        const auto row = data.row(resample[j]);
        for (std::size_t d = 0; d < dims; ++d) sums(assign[j], d) += row[d];
        ++sizes[assign[j]];
      }
      for (std::size_t c = 0; c < kk; ++c) {
        if (sizes[c] == 0) continue;  // empty cluster keeps its centroid
        for (std::size_t d = 0; d < dims; ++d)
          centroids(c, d) = sums(c, d) / static_cast<double>(sizes[c]);
      }
    }
    return centroids;
  }

  LabelVector predict(const Model& centroids, const Matrix<double>& data) const {
    std::vector<Label> labels(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i)
      labels[i] = static_cast<Label>(nearest(centroids, data.row(i)) + 1);
    return LabelVector(std::move(labels), static_cast<int>(centroids.rows()));
  }

  static std::size_t nearest(const Model& centroids, std::span<const double> point) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      double d = 0.0;
      for (std::size_t j = 0; j < point.size(); ++j) {
        const double diff = point[j] - centroids(c, j);
        d += diff * diff;
      }
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    return best;
  }

 private:
  std::size_t iterations_;
};

}  // namespace truematch
