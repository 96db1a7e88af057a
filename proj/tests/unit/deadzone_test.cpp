#include <cmath>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "forumpaths/deadzone.hpp"
#include "forumpaths/error.hpp"
#include "forumpaths/features.hpp"
#include "forumpaths/rng.hpp"
#include "oracles.hpp"

namespace forumpaths {
namespace {

using testing::archive_from_symbols;
using testing::repeat;

TEST(EstimateDensity, DecreasesAwayFromSinglePoint) {
  const auto g = estimate_density({{0, 0}}, 2.0, 10);
  EXPECT_EQ(g.extent(), 10);
  for (int i = 1; i <= 10; ++i) EXPECT_LT(g.at(i, i), g.at(i - 1, i - 1));
}

TEST(EstimateDensity, CoincidentPointsNormalizeAway) {
  const auto one = estimate_density({{3, 4}}, 2.0, 8);
  const auto two = estimate_density({{3, 4}, {3, 4}}, 2.0, 8);
  for (std::size_t i = 0; i < one.values().size(); ++i) EXPECT_NEAR(one.values()[i], two.values()[i], 1e-15);
}

TEST(EstimateDensity, SymmetricPair) {
  const auto g = estimate_density({{0, 0}, {5, 5}});
  EXPECT_NEAR(g.at(5, 5), g.at(0, 0), 1e-9);
  for (int x = 0; x <= 5; ++x)
    for (int y = 0; y <= 5; ++y) EXPECT_NEAR(g.at(x, y), g.at(5 - x, 5 - y), 1e-12);
}

TEST(EstimateDensity, SumsToOneAndMatchesDirectSum) {
  SeededRng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    PointCloud q;
    const auto n = 1 + rng.below(500);
    for (std::size_t i = 0; i < n; ++i)
      q.push_back({static_cast<std::int64_t>(rng.below(41)), static_cast<std::int64_t>(rng.below(41))});
    const double sigma = 0.5 + 3.0 * rng.uniform();
    const auto g = estimate_density(q, sigma);
    const auto oracle = testing::direct_kde(q, g.extent(), sigma);
    EXPECT_NEAR(std::accumulate(g.values().begin(), g.values().end(), 0.0), 1.0, 1e-9);
    for (std::size_t i = 0; i < oracle.size(); ++i) ASSERT_NEAR(g.values()[i], oracle[i], 1e-9);
  }
}

TEST(EstimateDensity, Errors) {
  EXPECT_THROW(estimate_density({}), DataError);
  EXPECT_THROW(estimate_density({{0, 0}}, 0.0), std::invalid_argument);
}

TEST(EstimateDensity, DuplicatingAPointNeverLowersItsDensity) {
  SeededRng rng(2);
  PointCloud q;
  for (int i = 0; i < 60; ++i)
    q.push_back({static_cast<std::int64_t>(rng.below(20)), static_cast<std::int64_t>(rng.below(20))});
  const auto before = estimate_density(q, 2.0, 19);
  for (int i = 0; i < 10; ++i) {
    const auto p = q[rng.below(q.size())];
    auto more = q;
    more.push_back(p);
    EXPECT_GE(estimate_density(more, 2.0, 19).at(p), before.at(p) - 1e-15);
  }
}

TEST(ComputeDeadZone, CoincidentPointsAreNotMasked) {
  const PointCloud q(5, LatticePoint{2, 2});
  const auto g = estimate_density(q, 2.0, 6);
  const auto r = compute_dead_zone(g, q);
  EXPECT_DOUBLE_EQ(r.threshold, g.at(2, 2));
  EXPECT_FALSE(r.in_mask({2, 2}));
  EXPECT_TRUE(r.outliers.empty());
}

TEST(ComputeDeadZone, NearestRankFlagsFourOfHundred) {
  // Find a seeded cloud of 100 distinct points whose densities are distinct.
  for (std::uint64_t seed = 0;; ++seed) {
    SeededRng rng(seed);
    std::set<LatticePoint> unique;
    while (unique.size() < 100)
      unique.insert({static_cast<std::int64_t>(rng.below(25)), static_cast<std::int64_t>(rng.below(25))});
    const PointCloud q(unique.begin(), unique.end());
    const auto g = estimate_density(q, 2.0);
    std::vector<double> d;
    for (const auto& p : q) d.push_back(g.at(p));
    std::sort(d.begin(), d.end());
    if (std::adjacent_find(d.begin(), d.end()) != d.end()) continue;
    const auto r = compute_dead_zone(g, q, 5.0);
    EXPECT_EQ(r.threshold, d[4]);
    EXPECT_EQ(r.outliers.size(), 4u);
    break;
  }
}

TEST(ComputeDeadZone, MaskGrowsWithPercentile) {
  SeededRng rng(3);
  PointCloud q;
  for (int i = 0; i < 300; ++i)
    q.push_back({static_cast<std::int64_t>(rng.below(30)), static_cast<std::int64_t>(rng.below(10))});
  const auto g = estimate_density(q);
  std::size_t last = 0;
  for (double pct : {0.5, 1.0, 5.0, 10.0, 50.0, 99.0}) {
    const auto r = compute_dead_zone(g, q, pct);
    EXPECT_GE(r.mask_size(), last);
    last = r.mask_size();
  }
  EXPECT_THROW(compute_dead_zone(g, q, 100.0), std::invalid_argument);
}

TEST(ComputeDeadZone, OffDiagonalIsMaskedOnSlopeOneForum) {
  std::vector<std::string> paths(200, repeat("pr", 100));
  const auto q = collect_points(archive_from_symbols(paths));
  const auto r = compute_dead_zone(estimate_density(q), q);
  EXPECT_TRUE(r.in_mask({80, 2}));
  EXPECT_FALSE(r.in_mask({40, 40}));
}

// Slope-1 paths of staggered lengths, so the diagonal is dense everywhere
// except near its far end.
std::vector<std::string> staggered_diagonal() {
  std::vector<std::string> paths;
  for (int i = 0; i < 200; ++i) paths.push_back(repeat("pr", 10 + (i * 7) % 91));
  return paths;
}

TEST(FlagOutlierUsers, DiagonalUserIsClean) {
  auto paths = staggered_diagonal();
  paths.push_back(repeat("pr", 20));
  const auto a = archive_from_symbols(paths);
  const auto q = collect_points(a);
  const auto flagged = flag_outlier_users(a, compute_dead_zone(estimate_density(q), q));
  EXPECT_EQ(flagged.count("u0200"), 0u);
}

TEST(FlagOutlierUsers, SpammerIsFlagged) {
  auto paths = staggered_diagonal();
  paths.push_back(std::string(100, 'p'));
  const auto a = archive_from_symbols(paths);
  const auto q = collect_points(a);
  const auto flagged = flag_outlier_users(a, compute_dead_zone(estimate_density(q), q));
  ASSERT_EQ(flagged.count("u0200"), 1u);
  const auto& pts = flagged.at("u0200");
  EXPECT_GE(pts.size(), 50u);
  for (const auto& p : pts) {
    EXPECT_EQ(p.y, 0);
    EXPECT_GT(p.x, 4);
  }
  EXPECT_EQ(pts.back().x, 100);
}

TEST(FlagOutlierUsers, EmptyArchive) {
  const auto g = estimate_density({{0, 0}});
  EXPECT_TRUE(flag_outlier_users(ForumArchive{}, compute_dead_zone(g, {{0, 0}})).empty());
}

}  // namespace
}  // namespace forumpaths
