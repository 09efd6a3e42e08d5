#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "truematch/crosstab.hpp"
#include "truematch/labels.hpp"
#include "truematch/matching.hpp"
#include "truematch/matrix.hpp"
#include "truematch/random.hpp"

namespace truematch {

// N x K vote counts accumulated over resampling rounds.
class VoteMatrix {
 public:
  VoteMatrix() = default;
  VoteMatrix(std::size_t n, std::size_t k) : votes_(n, k, 0) {
    if (k == 0) throw std::invalid_argument("vote matrix needs K >= 1");
  }

  std::size_t cases() const noexcept { return votes_.rows(); }
  std::size_t k() const noexcept { return votes_.cols(); }
  std::size_t total_rounds() const noexcept { return rounds_; }
  const Matrix<std::int64_t>& votes() const noexcept { return votes_; }
  std::int64_t operator()(std::size_t i, std::size_t k) const noexcept { return votes_(i, k); }

  std::int64_t row_sum(std::size_t i) const {
    std::int64_t s = 0;
    for (auto v : votes_.row(i)) s += v;
    return s;
  }

  std::int64_t total_votes() const {
    std::int64_t s = 0;
    for (auto v : votes_.values()) s += v;
    return s;
  }

  // One vote per case for its label in c; a full-participation round.
  void vote(const LabelVector& c) {
    if (c.size() != cases()) throw std::invalid_argument("vote: label vector length mismatch");
    for (std::size_t i = 0; i < c.size(); ++i) add(i, c[i]);
    ++rounds_;
  }

  // Partial-participation round: only the listed cases vote.
  void vote(std::span<const std::size_t> cases_in_round, std::span<const Label> labels) {
    if (cases_in_round.size() != labels.size())
      throw std::invalid_argument("vote: cases and labels differ in length");
    for (std::size_t j = 0; j < labels.size(); ++j) add(cases_in_round[j], labels[j]);
    ++rounds_;
  }

 private:
  void add(std::size_t i, Label l) {
    if (l < 1 || static_cast<std::size_t>(l) > k())
      throw std::invalid_argument("vote: label " + std::to_string(l) + " out of range");
    ++votes_(i, static_cast<std::size_t>(l - 1));
  }

  Matrix<std::int64_t> votes_;
  std::size_t rounds_ = 0;
};

// Row-stochastic estimate of cluster membership probabilities.
struct ProbMatrix {
  Matrix<double> probs;
};

// Divides each row by its sum. Every row must hold at least one vote.
inline ProbMatrix normalize(const VoteMatrix& c) {
  ProbMatrix p{Matrix<double>(c.cases(), c.k())};
  for (std::size_t i = 0; i < c.cases(); ++i) {
    const auto sum = c.row_sum(i);
    if (sum == 0) throw std::invalid_argument("normalize: case " + std::to_string(i + 1) + " has no votes");
    for (std::size_t k = 0; k < c.k(); ++k)
      p.probs(i, k) = static_cast<double>(c(i, k)) / static_cast<double>(sum);
  }
  return p;
}

// Index of the largest vote count in a row, ties broken uniformly at random.
inline std::size_t majority_column(std::span<const std::int64_t> row, Rng& rng) {
  std::int64_t best = -1;
  std::size_t ties = 0, chosen = 0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] > best) {
      best = row[k];
      ties = 1;
      chosen = k;
    } else if (row[k] == best) {
      // reservoir choice among the tied columns
      ++ties;
      if (uniform_index(rng, ties) == 0) chosen = k;
    }
  }
  if (best <= 0) throw std::invalid_argument("majority: row without votes");
  return chosen;
}

inline LabelVector majority_labels(const VoteMatrix& c, Rng& rng) {
  std::vector<Label> out(c.cases());
  for (std::size_t i = 0; i < c.cases(); ++i)
    out[i] = static_cast<Label>(majority_column(c.votes().row(i), rng) + 1);
  return LabelVector(std::move(out), static_cast<int>(c.k()));
}

// Model uncertainty H (mean row entropy, bits), relative model complexity,
// model information and the criterion CIC = I - H. I and RMC are computed
// from the column means q of P: I = entropy(q) - H, RMC = (2^entropy(q) - 1) / N.
struct CicStats {
  double H = 0.0;
  double RMC = 0.0;
  double I = 0.0;
  double CIC = 0.0;
};

inline double entropy2(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

inline CicStats cic_stats(const ProbMatrix& p) {
  const auto n = p.probs.rows();
  const auto k = p.probs.cols();
  if (n == 0) return {};
  double h = 0.0;
  std::vector<double> q(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = p.probs.row(i);
    h += entropy2(row);
    for (std::size_t j = 0; j < k; ++j) q[j] += row[j];
  }
  h /= static_cast<double>(n);
  for (auto& v : q) v /= static_cast<double>(n);
  const double hq = entropy2(q);

  CicStats s;
  s.H = h;
  s.RMC = (std::exp2(hq) - 1.0) / static_cast<double>(n);
  s.I = hq - h;
  s.CIC = s.I - s.H;
  return s;
}

// A base clusterer fits a K-cluster model to a resample and predicts
// labels 1..K for all cases of the data.
template <class C, class Data>
concept BaseClusterer = requires(const C& c, const Data& data, std::span<const std::size_t> idx,
                                 int k, Rng& rng, const typename C::Model& model) {
  { c.fit(data, idx, k, rng) } -> std::convertible_to<typename C::Model>;
  { c.predict(model, data) } -> std::convertible_to<LabelVector>;
};

struct MmccOptions {
  std::size_t rounds = 1000;
  Method matcher = Method::truematch;
  // Stop early once P changes by less than tolerance (max norm) over a window.
  bool early_stop = false;
  std::size_t window = 50;
  double tolerance = 1e-3;
};

struct MmccResult {
  VoteMatrix votes;
  ProbMatrix probs;
  std::size_t rounds_run = 0;
  bool stopped_early = false;
};

template <class Data>
std::size_t case_count(const Data& data) {
  if constexpr (requires { data.rows(); })
    return data.rows();
  else
    return data.size();
}

// Multiple match cluster count. The first resample votes unmatched; every
// later resample is aligned to the current majority labels before voting.
template <class Data, BaseClusterer<Data> Clusterer>
MmccResult mmcc_run(const Data& data, int k, const Clusterer& base, const MmccOptions& opt, Rng& rng) {
  const std::size_t n = case_count(data);
  if (opt.rounds < 2) throw std::invalid_argument("mmcc: need at least 2 rounds");
  if (k < 1) throw std::invalid_argument("mmcc: need K >= 1");
  if (n < static_cast<std::size_t>(k)) throw std::invalid_argument("mmcc: fewer cases than clusters");

  VoteMatrix votes(n, static_cast<std::size_t>(k));
  std::vector<std::size_t> resample(n);

  auto draw = [&]() -> LabelVector {
    for (auto& r : resample) r = uniform_index(rng, n);
    const auto model = base.fit(data, std::span<const std::size_t>(resample), k, rng);
    LabelVector c = base.predict(model, data);
    if (c.size() != n) throw std::runtime_error("mmcc: base clusterer predicted wrong number of cases");
    if (c.k() > k) throw std::runtime_error("mmcc: base clusterer returned label above K");
    return c.k() == k ? c : LabelVector(c.labels(), k);
  };

  votes.vote(draw());

  MmccResult result;
  Matrix<double> snapshot;
  std::size_t round = 1;
  while (round < opt.rounds) {
    LabelVector c = draw();
    const LabelVector current = majority_labels(votes, rng);
    const MatchResult m = match(crosstab(current, c, k), opt.matcher, rng);
    votes.vote(apply_permutation(c, m.perm));
    ++round;

    if (opt.early_stop && round % opt.window == 0) {
      auto p = normalize(votes).probs;
      if (!snapshot.empty()) {
        double change = 0.0;
        for (std::size_t i = 0; i < p.values().size(); ++i)
          change = std::max(change, std::abs(p.values()[i] - snapshot.values()[i]));
        if (change < opt.tolerance) {
          result.stopped_early = true;
          break;
        }
      }
      snapshot = std::move(p);
    }
  }
  result.rounds_run = round;
  result.probs = normalize(votes);
  result.votes = std::move(votes);
  return result;
}

}  // namespace truematch
