#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "fatigue/error.hpp"
#include "fatigue/evaluation.hpp"
#include "fatigue/synth.hpp"

namespace fatigue {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

Dataset dataset_of(std::size_t n) {
  SynthSpec spec;
  spec.n_samples = n;
  spec.seed = 1;
  return generate(spec);
}

TEST(SplitDatasetTest, FloorArithmetic) {
  const auto [train, test] = split_dataset(dataset_of(10), SplitSpec{});
  EXPECT_EQ(train.size(), 7u);
  EXPECT_EQ(test.size(), 3u);
  const auto big = split_indices(3978, SplitSpec{0.7, 5, true});
  EXPECT_EQ(big.train.size(), 2784u);
  EXPECT_EQ(big.test.size(), 1194u);
}

TEST(SplitDatasetTest, DeterministicPerSeed) {
  const auto d = dataset_of(50);
  const auto a = split_dataset(d, SplitSpec{0.7, 3, true});
  const auto b = split_dataset(d, SplitSpec{0.7, 3, true});
  EXPECT_EQ(a.first.samples, b.first.samples);
  EXPECT_EQ(a.second.samples, b.second.samples);
  const auto c = split_indices(50, SplitSpec{0.7, 4, true});
  EXPECT_NE(c.train, split_indices(50, SplitSpec{0.7, 3, true}).train);
}

TEST(SplitDatasetTest, PartitionPropertyAcrossSeedsAndSizes) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> size(2, 300);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = size(rng);
    const SplitSpec spec{frac(rng), rng(), true};
    IndexSplit split;
    try {
      split = split_indices(n, spec);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::EmptyPartition);
      const auto k = static_cast<std::size_t>(std::floor(n * spec.train_fraction));
      EXPECT_TRUE(k == 0 || k == n);
      continue;
    }
    std::set<std::size_t> all(split.train.begin(), split.train.end());
    for (auto i : split.test) EXPECT_TRUE(all.insert(i).second) << "overlap";
    EXPECT_EQ(all.size(), n);
    EXPECT_EQ(*all.rbegin(), n - 1);
    EXPECT_TRUE(std::is_sorted(split.train.begin(), split.train.end()));
  }
}

TEST(SplitDatasetTest, PartitionsKeepFrameOrderAndValidity) {
  const auto [train, test] = split_dataset(dataset_of(40), SplitSpec{0.6, 9, true});
  EXPECT_NO_THROW(validate_dataset(train));
  EXPECT_NO_THROW(validate_dataset(test));
}

TEST(SplitDatasetTest, UnshuffledTakesPrefix) {
  const auto s = split_indices(5, SplitSpec{0.6, 0, false});
  EXPECT_EQ(s.train, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(s.test, (std::vector<std::size_t>{3, 4}));
}

TEST(SplitDatasetTest, EmptyPartitionErrors) {
  EXPECT_EQ(code_of([] { split_indices(1, SplitSpec{}); }), ErrorCode::EmptyPartition);
  EXPECT_EQ(code_of([] { split_indices(3, SplitSpec{0.2, 0, true}); }), ErrorCode::EmptyPartition);
  EXPECT_EQ(code_of([] { split_indices(10, SplitSpec{1.0, 0, true}); }), ErrorCode::EmptyPartition);
}

TEST(ConfusionTest, BasicCountsAndTieRule) {
  const std::vector<double> p{0.9, 0.1};
  const std::vector<Label> y{Label::Fatigue, Label::NonFatigue};
  EXPECT_EQ(confusion(p, y), (ConfusionMatrix{1, 0, 0, 1}));
  const std::vector<double> tie{0.5};
  EXPECT_EQ(confusion(tie, std::vector<Label>{Label::Fatigue}).tp, 1u);
  EXPECT_EQ(confusion(tie, std::vector<Label>{Label::NonFatigue}).fp, 1u);
  const std::vector<double> wrong{0.1, 0.9};
  EXPECT_EQ(accuracy(confusion(wrong, y)), 0.0);
}

TEST(ConfusionTest, Errors) {
  const std::vector<Label> y{Label::Fatigue};
  EXPECT_EQ(code_of([&] { confusion(std::vector<double>{0.1, 0.2}, y); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([&] { confusion(std::vector<double>{1.2}, y); }), ErrorCode::InvalidProbability);
  EXPECT_EQ(code_of([&] { confusion(std::vector<double>{NAN}, y); }), ErrorCode::InvalidProbability);
  EXPECT_EQ(code_of([&] { confusion({}, {}); }), ErrorCode::LengthMismatch);
}

TEST(ConfusionTest, TotalsPermutationAndThresholdMonotonicity) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(1 + trial);
    std::vector<Label> y(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = u(rng);
      y[i] = u(rng) < 0.5 ? Label::Fatigue : Label::NonFatigue;
    }
    const auto cm = confusion(p, y);
    EXPECT_EQ(cm.total(), p.size());
    std::vector<std::size_t> perm(p.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> p2;
    std::vector<Label> y2;
    for (auto i : perm) {
      p2.push_back(p[i]);
      y2.push_back(y[i]);
    }
    EXPECT_EQ(confusion(p2, y2), cm);
    const auto a = accuracy(cm);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    ConfusionMatrix previous = confusion(p, y, 0.0);
    for (double t = 0.1; t <= 1.0; t += 0.1) {
      const auto now = confusion(p, y, t);
      EXPECT_LE(now.tp, previous.tp);
      EXPECT_GE(now.fn, previous.fn);
      previous = now;
    }
  }
}

TEST(MetricsTest, PublishedCountsReproduceRates) {
  const ConfusionMatrix table{1626, 198, 304, 1850};
  EXPECT_EQ(table.total(), 3978u);
  EXPECT_DOUBLE_EQ(accuracy(table), 3476.0 / 3978.0);
  EXPECT_NEAR(accuracy(table), 0.87381, 1e-5);
  EXPECT_DOUBLE_EQ(sensitivity(table), 1626.0 / 1824.0);
  EXPECT_NEAR(sensitivity(table) * 100.0, 89.14, 0.01);
}

TEST(MetricsTest, EdgeValuesAndErrors) {
  EXPECT_EQ(accuracy(ConfusionMatrix{1, 0, 0, 1}), 1.0);
  EXPECT_EQ(accuracy(ConfusionMatrix{0, 1, 1, 0}), 0.0);
  EXPECT_EQ(sensitivity(ConfusionMatrix{5, 0, 3, 2}), 1.0);
  EXPECT_EQ(sensitivity(ConfusionMatrix{0, 4, 0, 2}), 0.0);
  EXPECT_EQ(code_of([] { accuracy(ConfusionMatrix{}); }), ErrorCode::EmptyMatrix);
  EXPECT_EQ(code_of([] { sensitivity(ConfusionMatrix{0, 0, 3, 3}); }), ErrorCode::NoPositives);
}

}  // namespace
}  // namespace fatigue
