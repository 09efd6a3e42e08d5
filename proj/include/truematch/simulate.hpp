#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "truematch/agreement.hpp"
#include "truematch/crosstab.hpp"
#include "truematch/labels.hpp"
#include "truematch/matching.hpp"
#include "truematch/mmcc.hpp"
#include "truematch/random.hpp"

namespace truematch {

// Fictitious two-class clusterer. Class labels are 1 (true 0) and 2 (true 1);
// p is the population fraction of label 2. A case keeps its true class with
// probability kappa + (1 - kappa) * (1 - p) for label 1 and
// kappa + (1 - kappa) * p for label 2, otherwise it is flipped.
inline LabelVector fictitious_cluster(const LabelVector& x, double kappa, double p, Rng& rng) {
  if (x.k() > 2) throw std::invalid_argument("fictitious_cluster: binary classes only");
  const double keep1 = kappa + (1.0 - kappa) * (1.0 - p);
  const double keep2 = kappa + (1.0 - kappa) * p;
  std::vector<Label> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Label truth = x[i];
    const bool keep = bernoulli(rng, truth == 1 ? keep1 : keep2);
    out[i] = keep ? truth : 3 - truth;
  }
  return LabelVector(std::move(out), 2);
}

inline LabelVector fictitious_cluster(const LabelVector& x, double kappa, Rng& rng) {
  const auto counts = x.counts();
  const double p = counts.size() > 1 ? static_cast<double>(counts[1]) / static_cast<double>(x.size()) : 0.0;
  return fictitious_cluster(x, kappa, p, rng);
}

// Moves uniformly chosen members of the oversized class to the other one
// until the class counts equal target (label 1, label 2).
inline LabelVector enforce_sizes(const LabelVector& c, std::array<std::size_t, 2> target, Rng& rng) {
  if (c.k() > 2) throw std::invalid_argument("enforce_sizes: binary classes only");
  if (target[0] + target[1] != c.size()) throw std::invalid_argument("enforce_sizes: target does not sum to N");
  const auto counts = c.counts();
  const std::size_t have1 = counts[0];
  if (have1 == target[0]) return LabelVector(c.labels(), 2);

  const Label from = have1 > target[0] ? 1 : 2;
  const std::size_t excess = have1 > target[0] ? have1 - target[0] : target[0] - have1;
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] == from) members.push_back(i);
  // partial Fisher-Yates: the first `excess` slots become a uniform sample
  for (std::size_t j = 0; j < excess; ++j)
    std::swap(members[j], members[j + uniform_index(rng, members.size() - j)]);

  std::vector<Label> out = c.labels();
  for (std::size_t j = 0; j < excess; ++j) out[members[j]] = 3 - from;
  return LabelVector(std::move(out), 2);
}

struct SimulationConfig {
  std::size_t n = 100;
  double p = 0.5;       // fraction of the population in class 2
  double kappa = 0.0;   // reliability of the fictitious clusterer
  std::size_t rounds = 1000;
  bool fixed = false;   // enforce exact class sizes on every resample
  Method matcher = Method::truematch;
  std::uint64_t seed = kDefaultSeed;
  std::size_t redraw_budget = 1000;  // attempts per round before giving up

  void validate() const {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("simulation: p must lie in (0, 1)");
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw std::invalid_argument("simulation: kappa must lie in [0, 1]");
    if (rounds < 2) throw std::invalid_argument("simulation: need at least 2 rounds");
    if (n < 2) throw std::invalid_argument("simulation: need N >= 2");
    if (redraw_budget < 1) throw std::invalid_argument("simulation: redraw budget must be positive");
  }
};

struct CellResult {
  double p = 0.0;
  double kappa = 0.0;
  double H = 0.0;
  double RMC = 0.0;
  double I = 0.0;
  double CIC = 0.0;
  bool degenerate = false;
  std::uint64_t seed = 0;
  std::size_t rounds_accepted = 0;
  std::size_t redraws = 0;
};

// Everything a cell run exposes beyond its summary, for tests.
struct CellTrace {
  VoteMatrix votes;
  std::vector<double> class2_fraction;  // per accepted round, of c* over all N draws
};

namespace detail {

inline std::size_t class2_target(const SimulationConfig& cfg) {
  return static_cast<std::size_t>(std::llround(cfg.p * static_cast<double>(cfg.n)));
}

}  // namespace detail

// One (p, kappa) cell: bootstrap resamples of the true classes x, fictitious
// clustering of each resample, matching against the current majority labels
// of the in-bag cases, and presence-based voting by in-bag cases only.
inline CellResult simulate_cell(const SimulationConfig& cfg, CellTrace* trace = nullptr) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed);
  const std::size_t n = cfg.n;
  const std::size_t ones = detail::class2_target(cfg);

  std::vector<Label> truth(n, 1);
  std::fill(truth.end() - static_cast<std::ptrdiff_t>(ones), truth.end(), 2);
  const double p_pop = static_cast<double>(ones) / static_cast<double>(n);

  VoteMatrix votes(n, 2);
  CellResult out{cfg.p, cfg.kappa};
  out.seed = cfg.seed;

  std::vector<std::size_t> draws(n);
  std::vector<std::int8_t> first_label(n);
  std::vector<std::size_t> inbag;
  std::vector<Label> inbag_labels;
  std::vector<Label> voted_current, voted_new;
  bool exhausted = false;

  while (out.rounds_accepted < cfg.rounds && !exhausted) {
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < cfg.redraw_budget && !accepted; ++attempt) {
      if (attempt > 0) ++out.redraws;
      std::vector<Label> sampled(n);
      for (std::size_t j = 0; j < n; ++j) {
        draws[j] = uniform_index(rng, n);
        sampled[j] = truth[draws[j]];
      }
      LabelVector cstar = fictitious_cluster(LabelVector(std::move(sampled), 2), cfg.kappa, p_pop, rng);
      if (cfg.fixed) cstar = enforce_sizes(cstar, {n - ones, ones}, rng);

      // one judgment per distinct case: its first occurrence in the resample
      std::fill(first_label.begin(), first_label.end(), 0);
      for (std::size_t j = 0; j < n; ++j)
        if (!first_label[draws[j]]) first_label[draws[j]] = static_cast<std::int8_t>(cstar[j]);
      inbag.clear();
      inbag_labels.clear();
      for (std::size_t i = 0; i < n; ++i)
        if (first_label[i]) {
          inbag.push_back(i);
          inbag_labels.push_back(first_label[i]);
        }
      const bool two_classes = std::find(inbag_labels.begin(), inbag_labels.end(), 3 - inbag_labels.front()) !=
                               inbag_labels.end();
      if (!two_classes) continue;

      if (out.rounds_accepted > 0) {
        // current estimate for in-bag cases that already hold votes
        voted_current.clear();
        voted_new.clear();
        for (std::size_t j = 0; j < inbag.size(); ++j) {
          if (votes.row_sum(inbag[j]) == 0) continue;
          voted_current.push_back(static_cast<Label>(majority_column(votes.votes().row(inbag[j]), rng) + 1));
          voted_new.push_back(inbag_labels[j]);
        }
        const bool estimate_ok =
            !voted_current.empty() &&
            std::find(voted_current.begin(), voted_current.end(), 3 - voted_current.front()) != voted_current.end();
        if (!estimate_ok) continue;

        const auto t = crosstab(LabelVector(voted_current, 2), LabelVector(voted_new, 2), 2);
        const auto m = match(t, cfg.matcher, rng);
        for (auto& l : inbag_labels) l = static_cast<Label>(m.perm[static_cast<std::size_t>(l - 1)] + 1);
      }

      votes.vote(inbag, inbag_labels);
      ++out.rounds_accepted;
      accepted = true;
      if (trace) {
        const auto c = cstar.counts();
        trace->class2_fraction.push_back(static_cast<double>(c[1]) / static_cast<double>(n));
      }
    }
    if (!accepted) exhausted = true;
  }

  // summarize the cases that received votes
  std::vector<std::size_t> voted;
  for (std::size_t i = 0; i < n; ++i)
    if (votes.row_sum(i) > 0) voted.push_back(i);
  ProbMatrix probs{Matrix<double>(voted.size(), 2)};
  bool seen[2] = {false, false};
  for (std::size_t r = 0; r < voted.size(); ++r) {
    const auto row = votes.votes().row(voted[r]);
    const double sum = static_cast<double>(row[0] + row[1]);
    probs.probs(r, 0) = static_cast<double>(row[0]) / sum;
    probs.probs(r, 1) = static_cast<double>(row[1]) / sum;
    seen[majority_column(row, rng)] = true;
  }
  const auto stats = cic_stats(probs);
  out.H = stats.H;
  out.RMC = stats.RMC;
  out.I = stats.I;
  out.CIC = stats.CIC;
  out.degenerate = exhausted || !(seen[0] && seen[1]);
  if (trace) trace->votes = std::move(votes);
  return out;
}

inline std::uint64_t derive_cell_seed(std::uint64_t seed, std::size_t p_index, std::size_t kappa_index) {
  return seed ^ ((static_cast<std::uint64_t>(p_index) << 32) | static_cast<std::uint64_t>(kappa_index));
}

// Evaluates every (p, kappa) pair, p-major. Cells run on `threads` workers;
// on_row, if set, receives results in row-major order as soon as the
// ordered prefix is complete.
inline std::vector<CellResult> grid_sweep(const std::vector<double>& ps, const std::vector<double>& kappas,
                                          const SimulationConfig& defaults, unsigned threads = 1,
                                          const std::function<void(const CellResult&)>& on_row = {}) {
  if (ps.empty() || kappas.empty()) throw std::invalid_argument("grid_sweep: empty grid");
  const std::size_t cells = ps.size() * kappas.size();
  std::vector<std::optional<CellResult>> results(cells);
  std::vector<SimulationConfig> configs(cells, defaults);
  for (std::size_t ip = 0; ip < ps.size(); ++ip)
    for (std::size_t ik = 0; ik < kappas.size(); ++ik) {
      auto& c = configs[ip * kappas.size() + ik];
      c.p = ps[ip];
      c.kappa = kappas[ik];
      c.seed = derive_cell_seed(defaults.seed, ip, ik);
      c.validate();
    }

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t emitted = 0;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      CellResult r = simulate_cell(configs[i]);
      std::lock_guard lock(mu);
      results[i] = r;
      while (emitted < cells && results[emitted]) {
        if (on_row) on_row(*results[emitted]);
        ++emitted;
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<CellResult> out;
  out.reserve(cells);
  for (auto& r : results) out.push_back(*r);
  return out;
}

struct OutlierSummary {
  Matrix<double> expected_table;  // mean presented table, as fractions of N
  AgreementStats mean_stats;
  double random_match_rate = 0.0;  // both outlier picks coincide
  std::size_t runs = 0;
};

// Two independent clusterings of n cases into n-1 normal cases (label 1)
// and one randomly picked outlier (label 2), matched with `matcher`.
inline OutlierSummary outlier_scenario(std::size_t runs, Method matcher, Rng& rng, std::size_t n = 100) {
  if (runs < 1) throw std::invalid_argument("outlier_scenario: need at least one run");
  if (n < 2) throw std::invalid_argument("outlier_scenario: need n >= 2");
  OutlierSummary s;
  s.expected_table = Matrix<double>(2, 2, 0.0);
  s.runs = runs;
  std::size_t coincide = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const std::size_t u1 = uniform_index(rng, n);
    const std::size_t u2 = uniform_index(rng, n);
    if (u1 == u2) ++coincide;
    std::vector<Label> a(n, 1), b(n, 1);
    a[u1] = 2;
    b[u2] = 2;
    const auto table = crosstab(LabelVector(std::move(a), 2), LabelVector(std::move(b), 2), 2);
    const auto result = match(table, matcher, rng);
    const auto& t = result.presented_table;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        s.expected_table(i, j) += static_cast<double>(t(i, j)) / static_cast<double>(n);
    const auto stats = agreement(t);
    s.mean_stats.diagonal += stats.diagonal;
    s.mean_stats.kappa += stats.kappa;
    s.mean_stats.rand += stats.rand;
    s.mean_stats.crand += stats.crand;
  }
  const double inv = 1.0 / static_cast<double>(runs);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) s.expected_table(i, j) *= inv;
  s.mean_stats.diagonal *= inv;
  s.mean_stats.kappa *= inv;
  s.mean_stats.rand *= inv;
  s.mean_stats.crand *= inv;
  s.random_match_rate = static_cast<double>(coincide) * inv;
  return s;
}

}  // namespace truematch
