#include <cmath>
#include <numeric>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "truematch/simulate.hpp"

namespace truematch {
namespace {

LabelVector classes(std::size_t n, std::size_t twos) {
  std::vector<Label> v(n, 1);
  std::fill(v.end() - static_cast<std::ptrdiff_t>(twos), v.end(), 2);
  return LabelVector(std::move(v), 2);
}

bool same(const CellResult& a, const CellResult& b) {
  return a.H == b.H && a.RMC == b.RMC && a.I == b.I && a.CIC == b.CIC && a.degenerate == b.degenerate &&
         a.seed == b.seed && a.rounds_accepted == b.rounds_accepted && a.redraws == b.redraws;
}

TEST(Fictitious, PerfectReliabilityIsIdentity) {
  Rng rng = make_rng(51);
  const auto x = classes(100, 30);
  EXPECT_EQ(fictitious_cluster(x, 1.0, rng), x);
}

TEST(Fictitious, RandomClustererPreservesMarginal) {
  // kappa = 0: every case lands in class 2 with probability p
  Rng rng = make_rng(52);
  for (double p : {0.5, 0.7, 0.9}) {
    const auto x = classes(1000, static_cast<std::size_t>(p * 1000));
    double class2 = 0, kept1 = 0, kept2 = 0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
      const auto c = fictitious_cluster(x, 0.0, rng);
      for (std::size_t i = 0; i < x.size(); ++i) {
        class2 += c[i] == 2;
        if (x[i] == 1) kept1 += c[i] == 1;
        if (x[i] == 2) kept2 += c[i] == 2;
      }
    }
    const double n1 = (1000 - p * 1000) * reps, n2 = p * 1000 * reps;
    EXPECT_NEAR(class2 / (1000.0 * reps), p, 0.02);
    EXPECT_NEAR(kept1 / n1, 1 - p, 0.02);
    EXPECT_NEAR(kept2 / n2, p, 0.02);
  }
}

TEST(Fictitious, Errors) {
  Rng rng = make_rng(53);
  EXPECT_THROW(fictitious_cluster(LabelVector({1, 2, 3}), 0.5, rng), std::invalid_argument);
}

TEST(EnforceSizes, Examples) {
  Rng rng = make_rng(54);
  const auto c = LabelVector({1, 1, 1, 2});
  EXPECT_EQ(enforce_sizes(c, {3, 1}, rng), c);
  const auto moved = enforce_sizes(c, {2, 2}, rng);
  EXPECT_EQ(moved.counts(), (std::vector<std::size_t>{2, 2}));
  EXPECT_EQ(moved[3], 2);  // class-2 member untouched
  const auto back = enforce_sizes(LabelVector({2, 2, 2, 2}, 2), {4, 0}, rng);
  EXPECT_EQ(back.labels(), (std::vector<Label>{1, 1, 1, 1}));
  EXPECT_THROW(enforce_sizes(c, {1, 1}, rng), std::invalid_argument);
}

TEST(EnforceSizes, OnlyOversizedClassMoves) {
  Rng rng = make_rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Label> v(50);
    for (auto& l : v) l = static_cast<Label>(1 + uniform_index(rng, 2));
    const LabelVector c(v, 2);
    const std::size_t ones = uniform_index(rng, 51);
    const auto out = enforce_sizes(c, {50 - ones, ones}, rng);
    EXPECT_EQ(out.counts()[1], ones);
    const Label from = c.counts()[0] > 50 - ones ? 1 : 2;
    for (std::size_t i = 0; i < 50; ++i)
      if (out[i] != c[i]) {
        EXPECT_EQ(c[i], from);
      }
  }
}

TEST(SimulationConfig, Validate) {
  SimulationConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.p = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.p = 0.5;
  cfg.kappa = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.kappa = 0.0;
  cfg.rounds = 1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(SimulateCell, Deterministic) {
  SimulationConfig cfg;
  cfg.rounds = 100;
  cfg.p = 0.7;
  cfg.kappa = 0.5;
  EXPECT_TRUE(same(simulate_cell(cfg), simulate_cell(cfg)));
  cfg.seed += 1;
  const auto other = simulate_cell(cfg);
  cfg.seed -= 1;
  EXPECT_FALSE(same(simulate_cell(cfg), other));
}

TEST(SimulateCell, FixedModeHasExactSizes) {
  SimulationConfig cfg;
  cfg.rounds = 100;
  cfg.p = 0.7;
  cfg.fixed = true;
  CellTrace trace;
  simulate_cell(cfg, &trace);
  ASSERT_EQ(trace.class2_fraction.size(), 100u);
  for (double f : trace.class2_fraction) EXPECT_EQ(f, 0.7);
}

TEST(SimulateCell, NonFixedModeMatchesP) {
  for (double p : {0.5, 0.7, 0.9}) {
    SimulationConfig cfg;
    cfg.rounds = 1000;
    cfg.p = p;
    CellTrace trace;
    simulate_cell(cfg, &trace);
    const double mean = std::accumulate(trace.class2_fraction.begin(), trace.class2_fraction.end(), 0.0) /
                        static_cast<double>(trace.class2_fraction.size());
    EXPECT_NEAR(mean, p, 0.02);
  }
}

TEST(SimulateCell, PerfectClustererIsCrisp) {
  SimulationConfig cfg;
  cfg.rounds = 200;
  cfg.kappa = 1.0;
  for (auto method : {Method::tracemax, Method::truematch}) {
    cfg.matcher = method;
    const auto r = simulate_cell(cfg);
    EXPECT_EQ(r.H, 0.0);
    EXPECT_FALSE(r.degenerate);
    EXPECT_NEAR(r.I, 1.0, 0.01);
  }
}

TEST(SimulateCell, NeverResampledRowsStayEmpty) {
  // with N=100 and few rounds some cases are never drawn; their rows stay zero
  // and every voted case holds at most one vote per accepted round
  SimulationConfig cfg;
  cfg.rounds = 3;
  CellTrace trace;
  const auto r = simulate_cell(cfg, &trace);
  std::size_t empty = 0;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < trace.votes.cases(); ++i) {
    EXPECT_LE(trace.votes.row_sum(i), static_cast<std::int64_t>(r.rounds_accepted));
    empty += trace.votes.row_sum(i) == 0;
    total += trace.votes.row_sum(i);
  }
  EXPECT_GT(empty, 0u);
  // each round votes with its distinct in-bag cases, about 63% of N
  EXPECT_NEAR(static_cast<double>(total) / (3 * 100.0), 0.632, 0.1);
}

TEST(SimulateCell, RedrawBudgetExhaustionIsDegenerate) {
  SimulationConfig cfg;
  cfg.n = 2;
  cfg.p = 0.5;
  cfg.kappa = 1.0;
  cfg.rounds = 50;
  cfg.redraw_budget = 1;  // any single-class resample ends the run
  const auto r = simulate_cell(cfg);
  EXPECT_TRUE(r.degenerate);
  EXPECT_LT(r.rounds_accepted, 50u);
}

TEST(GridSweep, SingleCellEqualsSimulateCell) {
  SimulationConfig cfg;
  cfg.rounds = 50;
  const auto grid = grid_sweep({0.7}, {0.5}, cfg);
  ASSERT_EQ(grid.size(), 1u);
  cfg.p = 0.7;
  cfg.kappa = 0.5;
  EXPECT_TRUE(same(grid[0], simulate_cell(cfg)));
}

TEST(GridSweep, RowMajorAndThreadIndependent) {
  SimulationConfig cfg;
  cfg.rounds = 40;
  const std::vector<double> ps{0.5, 0.7, 0.9}, ks{0.0, 0.5, 1.0};
  std::vector<CellResult> streamed;
  const auto serial = grid_sweep(ps, ks, cfg, 1, [&](const CellResult& r) { streamed.push_back(r); });
  const auto parallel = grid_sweep(ps, ks, cfg, 4);
  ASSERT_EQ(serial.size(), 9u);
  ASSERT_EQ(streamed.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_EQ(serial[i].p, ps[i / 3]);
    EXPECT_EQ(serial[i].kappa, ks[i % 3]);
    EXPECT_EQ(serial[i].seed, derive_cell_seed(cfg.seed, i / 3, i % 3));
    EXPECT_TRUE(same(serial[i], parallel[i]));
    EXPECT_TRUE(same(serial[i], streamed[i]));
  }
}

TEST(GridSweep, StreamsInOrderUnderThreads) {
  SimulationConfig cfg;
  cfg.rounds = 20;
  std::vector<double> ps{0.3, 0.5, 0.7, 0.9}, ks{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<std::pair<double, double>> order;
  grid_sweep(ps, ks, cfg, 8, [&](const CellResult& r) { order.emplace_back(r.p, r.kappa); });
  ASSERT_EQ(order.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(order[i], std::make_pair(ps[i / 5], ks[i % 5]));
}

TEST(GridSweep, Errors) {
  EXPECT_THROW(grid_sweep({}, {0.5}, SimulationConfig{}), std::invalid_argument);
  EXPECT_THROW(grid_sweep({1.5}, {0.5}, SimulationConfig{}), std::invalid_argument);
}

TEST(OutlierScenario, SmallRunShape) {
  Rng rng = make_rng(56);
  const auto s = outlier_scenario(500, Method::tracemax, rng);
  double sum = 0;
  for (auto v : s.expected_table.values()) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_GT(s.mean_stats.diagonal, 0.97);
  EXPECT_NEAR(s.mean_stats.rand, 0.961, 0.01);
  EXPECT_EQ(s.runs, 500u);
  EXPECT_THROW(outlier_scenario(0, Method::tracemax, rng), std::invalid_argument);
}

TEST(OutlierScenario, TruematchInvariantIndices) {
  Rng rng = make_rng(57);
  const auto s = outlier_scenario(5000, Method::truematch, rng);
  EXPECT_NEAR(s.mean_stats.rand, 0.961, 0.01);
  EXPECT_NEAR(s.mean_stats.crand, 0.0, 0.01);
  EXPECT_LT(s.mean_stats.diagonal, 0.05);
}

}  // namespace
}  // namespace truematch
