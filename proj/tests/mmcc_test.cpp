#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "truematch/fictitious.hpp"
#include "truematch/lloyd.hpp"
#include "truematch/mmcc.hpp"

namespace truematch {
namespace {

ProbMatrix probs(std::initializer_list<std::initializer_list<double>> rows) {
  return ProbMatrix{Matrix<double>(rows)};
}

// Returns labels of the wrong length; mmcc must refuse them.
struct ShortClusterer {
  using Model = LabelVector;
  LabelVector fit(const std::vector<int>&, std::span<const std::size_t>, int k, Rng&) const {
    return LabelVector({1}, k);
  }
  LabelVector predict(const LabelVector& m, const std::vector<int>&) const { return m; }
};

static_assert(BaseClusterer<LloydClusterer, Matrix<double>>);
static_assert(BaseClusterer<RandomPartitionClusterer, std::vector<int>>);
static_assert(BaseClusterer<PlantedPartitionClusterer, std::vector<int>>);

TEST(VoteMatrix, FullRoundAddsN) {
  VoteMatrix c(4, 3);
  c.vote(LabelVector({1, 2, 3, 3}, 3));
  EXPECT_EQ(c.total_votes(), 4);
  c.vote(LabelVector({1, 1, 1, 1}, 3));
  EXPECT_EQ(c.total_votes(), 8);
  EXPECT_EQ(c(0, 0), 2);
  EXPECT_EQ(c(3, 2), 1);
  EXPECT_EQ(c.total_rounds(), 2u);
}

TEST(VoteMatrix, PartialRoundAndErrors) {
  VoteMatrix c(3, 2);
  const std::vector<std::size_t> cases{2};
  const std::vector<Label> labels{2};
  c.vote(cases, labels);
  EXPECT_EQ(c.row_sum(0), 0);
  EXPECT_EQ(c(2, 1), 1);
  EXPECT_THROW(c.vote(LabelVector({1, 2})), std::invalid_argument);
  const std::vector<Label> bad{3};
  EXPECT_THROW(c.vote(cases, bad), std::invalid_argument);
  EXPECT_THROW(VoteMatrix(3, 0), std::invalid_argument);
}

TEST(Normalize, RowStochastic) {
  VoteMatrix c(2, 2);
  c.vote(LabelVector({1, 2}));
  c.vote(LabelVector({1, 1}));
  const auto p = normalize(c);
  EXPECT_EQ(p.probs(0, 0), 1.0);
  EXPECT_EQ(p.probs(1, 0), 0.5);
  EXPECT_EQ(p.probs(1, 1), 0.5);
  EXPECT_THROW(normalize(VoteMatrix(2, 2)), std::invalid_argument);
}

TEST(Majority, TiesAreRandom) {
  const std::vector<std::int64_t> row{3, 3, 1};
  Rng rng = make_rng(31);
  int first = 0;
  for (int i = 0; i < 4000; ++i) {
    const auto c = majority_column(row, rng);
    ASSERT_LT(c, 2u);
    first += c == 0;
  }
  EXPECT_NEAR(first / 4000.0, 0.5, 0.03);
  const std::vector<std::int64_t> empty{0, 0};
  EXPECT_THROW(majority_column(empty, rng), std::invalid_argument);
  const std::vector<std::int64_t> clear{1, 5, 2};
  EXPECT_EQ(majority_column(clear, rng), 1u);
}

TEST(CicStats, CrispBalanced) {
  Matrix<double> m(100, 2, 0.0);
  for (std::size_t i = 0; i < 100; ++i) m(i, i < 50 ? 0 : 1) = 1.0;
  const auto s = cic_stats(ProbMatrix{m});
  EXPECT_NEAR(s.H, 0.0, 1e-15);
  EXPECT_NEAR(s.RMC, 0.01, 1e-12);
  EXPECT_NEAR(s.I, 1.0, 1e-12);
  EXPECT_NEAR(s.CIC, 1.0, 1e-12);
}

TEST(CicStats, JustifiedPlusFuzzy) {
  // 50 crisp cases, 50 split evenly over two more columns
  Matrix<double> m(100, 3, 0.0);
  for (std::size_t i = 0; i < 100; ++i) {
    if (i < 50) {
      m(i, 0) = 1.0;
    } else {
      m(i, 1) = m(i, 2) = 0.5;
    }
  }
  const auto s = cic_stats(ProbMatrix{m});
  EXPECT_NEAR(s.H, 0.5, 1e-12);
  EXPECT_NEAR(s.RMC, (std::pow(2.0, 1.5) - 1.0) / 100.0, 1e-12);
  EXPECT_NEAR(s.RMC, 0.01828, 1e-5);
  EXPECT_NEAR(s.I, 1.0, 1e-12);
  EXPECT_NEAR(s.CIC, 0.5, 1e-12);
}

TEST(CicStats, UniformRows) {
  const auto s = cic_stats(probs({{0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}}));
  EXPECT_NEAR(s.H, 2.0, 1e-12);
  EXPECT_NEAR(s.I, 0.0, 1e-12);
  EXPECT_NEAR(s.RMC, 1.5, 1e-12);
  EXPECT_NEAR(s.CIC, -2.0, 1e-12);
}

TEST(Lloyd, TwoPoints) {
  const Matrix<double> data{{0}, {0}, {10}, {10}};
  const std::vector<std::size_t> all{0, 1, 2, 3};
  LloydClusterer lloyd;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = make_rng(seed);
    auto c = lloyd.fit(data, all, 2, rng);
    std::vector<double> centers{c(0, 0), c(1, 0)};
    std::sort(centers.begin(), centers.end());
    EXPECT_EQ(centers, (std::vector<double>{0, 10}));
    const auto labels = lloyd.predict(c, data);
    EXPECT_EQ(labels[0], labels[1]);
    EXPECT_NE(labels[0], labels[2]);
  }
}

TEST(Lloyd, TooFewDistinctRows) {
  const Matrix<double> data{{1}, {1}, {1}};
  const std::vector<std::size_t> all{0, 1, 2};
  Rng rng = make_rng(1);
  EXPECT_THROW(LloydClusterer().fit(data, all, 2, rng), std::invalid_argument);
}

Matrix<double> blobs(std::size_t n, double gap, Rng& rng) {
  Matrix<double> m(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double shift = i < n / 2 ? 0.0 : gap;
    m(i, 0) = shift + uniform01(rng);
    m(i, 1) = uniform01(rng);
  }
  return m;
}

TEST(Mmcc, SeparableBlobsAreCrisp) {
  Rng rng = make_rng(41);
  const auto data = blobs(60, 20.0, rng);
  MmccOptions opt;
  opt.rounds = 100;
  const auto r = mmcc_run(data, 2, LloydClusterer(), opt, rng);
  const auto s = cic_stats(r.probs);
  EXPECT_LT(s.H, 0.01);
  EXPECT_GT(s.CIC, 0.9);
  EXPECT_EQ(r.rounds_run, 100u);
}

TEST(Mmcc, UniformDataIsFuzzy) {
  Rng rng = make_rng(42);
  const auto data = blobs(60, 0.0, rng);
  MmccOptions opt;
  opt.rounds = 100;
  const auto r = mmcc_run(data, 2, LloydClusterer(), opt, rng);
  EXPECT_GT(cic_stats(r.probs).H, 0.05);
}

TEST(Mmcc, JustifiedPartitionIsCrisp) {
  const std::vector<int> data(100);
  for (auto method : {Method::tracemax, Method::truematch, Method::truematch_heuristic}) {
    Rng rng = make_rng(43);
    MmccOptions opt;
    opt.rounds = 200;
    opt.matcher = method;
    const auto r = mmcc_run(data, 2, PlantedPartitionClusterer(50, {50}), opt, rng);
    EXPECT_EQ(cic_stats(r.probs).H, 0.0) << to_string(method);
    EXPECT_EQ(r.votes.total_votes(), 200 * 100);
  }
}

TEST(Mmcc, EarlyStop) {
  const std::vector<int> data(100);
  Rng rng = make_rng(44);
  MmccOptions opt;
  opt.rounds = 1000;
  opt.early_stop = true;
  const auto r = mmcc_run(data, 2, PlantedPartitionClusterer(50, {50}), opt, rng);
  EXPECT_TRUE(r.stopped_early);
  EXPECT_EQ(r.rounds_run, 2 * opt.window);
}

TEST(Mmcc, Deterministic) {
  const std::vector<int> data(100);
  Rng r1 = make_rng(45), r2 = make_rng(45);
  MmccOptions opt;
  opt.rounds = 50;
  const auto a = mmcc_run(data, 2, RandomPartitionClusterer({50, 50}), opt, r1);
  const auto b = mmcc_run(data, 2, RandomPartitionClusterer({50, 50}), opt, r2);
  EXPECT_EQ(a.votes.votes(), b.votes.votes());
}

TEST(Mmcc, Errors) {
  const std::vector<int> data(4);
  Rng rng = make_rng(46);
  MmccOptions opt;
  opt.rounds = 1;
  EXPECT_THROW(mmcc_run(data, 2, RandomPartitionClusterer({2, 2}), opt, rng), std::invalid_argument);
  opt.rounds = 10;
  EXPECT_THROW(mmcc_run(data, 0, RandomPartitionClusterer({2, 2}), opt, rng), std::invalid_argument);
  EXPECT_THROW(mmcc_run(data, 5, RandomPartitionClusterer({2, 2}), opt, rng), std::invalid_argument);
  EXPECT_THROW(mmcc_run(data, 2, ShortClusterer(), opt, rng), std::runtime_error);
}

}  // namespace
}  // namespace truematch
