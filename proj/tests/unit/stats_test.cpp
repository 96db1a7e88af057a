#include <gtest/gtest.h>

#include "forumpaths/error.hpp"
#include "forumpaths/rng.hpp"
#include "forumpaths/stats.hpp"
#include "oracles.hpp"

namespace forumpaths {
namespace {

using testing::brute_force_ranks;
using testing::brute_force_spearman;
using testing::direct_pearson;

TEST(Stats, PearsonOfLinearDataIsOne) {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  EXPECT_DOUBLE_EQ(stats::pearson(x, y), 1.0);
  const std::vector<double> z{4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(stats::pearson(x, z), -1.0);
}

TEST(Stats, PearsonConstantInputIsUndefined) {
  const std::vector<double> x{1, 2, 3}, y{5, 5, 5};
  EXPECT_THROW(stats::pearson(x, y), UndefinedStatistic);
}

TEST(Stats, AverageRanksHandleTies) {
  const std::vector<double> v{10, 20, 20, 5};
  const std::vector<double> expect{2, 3.5, 3.5, 1};
  EXPECT_EQ(stats::average_ranks(v), expect);
}

TEST(Stats, SpearmanMatchesBruteForceOnRandomTiedData) {
  SeededRng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = 3 + rng.below(60);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.below(10));
      y[i] = static_cast<double>(rng.below(10)) + x[i] * 0.3;
    }
    double expected;
    try {
      expected = brute_force_spearman(x, y);
    } catch (...) {
      continue;
    }
    if (!std::isfinite(expected)) {
      EXPECT_THROW(stats::spearman(x, y), UndefinedStatistic);
      continue;
    }
    EXPECT_NEAR(stats::spearman(x, y), expected, 1e-12);
    EXPECT_EQ(stats::average_ranks(x), brute_force_ranks(x));
  }
}

TEST(Stats, PearsonMatchesDirectFormula) {
  SeededRng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(50), y(50);
    for (int i = 0; i < 50; ++i) {
      x[i] = rng.uniform() * 100;
      y[i] = x[i] * 0.5 + rng.uniform() * 20;
    }
    EXPECT_NEAR(stats::pearson(x, y), direct_pearson(x, y), 1e-12);
  }
}

}  // namespace
}  // namespace forumpaths
