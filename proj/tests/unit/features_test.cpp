#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "forumpaths/error.hpp"
#include "forumpaths/features.hpp"
#include "forumpaths/models.hpp"
#include "forumpaths/rng.hpp"
#include "oracles.hpp"

namespace forumpaths {
namespace {

using testing::archive_from_symbols;
using testing::repeat;

PointCloud cloud(std::initializer_list<std::pair<int, int>> xy) {
  PointCloud q;
  for (auto [x, y] : xy) q.push_back({x, y});
  return q;
}

TEST(FitForumSlope, Examples) {
  EXPECT_DOUBLE_EQ(fit_forum_slope(cloud({{0, 0}, {1, 0}, {1, 1}})).slope, 0.5);

  const auto q = collect_points(archive_from_symbols({"prprpr"}));
  EXPECT_DOUBLE_EQ(fit_forum_slope(q).slope, 22.0 / 28.0);
  EXPECT_NEAR(fit_forum_slope(q).slope, testing::brute_force_slope(q, 0.0, 3.0, 1e-5), 1e-4);

  const auto flat = fit_forum_slope(collect_points(archive_from_symbols({"ppp"})));
  EXPECT_EQ(flat.slope, 0.0);
  EXPECT_TRUE(flat.degenerate);
  EXPECT_THROW(fit_forum_slope(cloud({{0, 0}})), DataError);
}

TEST(FitForumSlope, MatchesBruteForceOnRandomArchives) {
  SeededRng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> paths;
    const double p = 0.3 + 0.5 * rng.uniform();
    for (int u = 0; u < 5; ++u) paths.push_back(generate_coin_toss(1 + static_cast<std::int64_t>(rng.below(40)), p, rng));
    const auto q = collect_points(archive_from_symbols(paths));
    EXPECT_NEAR(fit_forum_slope(q).slope, testing::brute_force_slope(q, 0.0, 3.0, 1e-5), 1e-4);
  }
}

TEST(ComputeSpread, Examples) {
  const auto q = cloud({{0, 0}, {1, 0}, {1, 1}});
  EXPECT_NEAR(compute_spread(q, 0.5), std::sqrt(1.0 / 6.0), 1e-15);
  EXPECT_NEAR(compute_spread(q, 0.5), std::sqrt(testing::squared_error(q, 0.5) / 3.0), 1e-15);
  EXPECT_EQ(compute_spread(cloud({{0, 0}, {1, 2}, {3, 6}}), 2.0), 0.0);
  auto twice = q;
  twice.insert(twice.end(), q.begin(), q.end());
  EXPECT_DOUBLE_EQ(compute_spread(twice, 0.5), compute_spread(q, 0.5));
}

TEST(CollectPoints, KeepsMultiplicityAndOrigins) {
  const auto q = collect_points(archive_from_symbols({"pr", "pr", "p"}));
  EXPECT_EQ(q.size(), 3u + 3u + 2u);
  EXPECT_EQ(std::count(q.begin(), q.end(), LatticePoint{0, 0}), 3);
}

TEST(ComputeForumFeatures, SmallForum) {
  const auto a = archive_from_symbols({"pprp", "prr"});
  const auto f = compute_forum_features(a);
  EXPECT_EQ(f.size, 2);
  EXPECT_DOUBLE_EQ(f.length, 3.5);
  EXPECT_DOUBLE_EQ(f.base, 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(f.offset, f.slope - f.base);
  EXPECT_DOUBLE_EQ(f.spread, compute_spread(collect_points(a), f.slope));
  EXPECT_THROW(compute_forum_features(ForumArchive{}), DataError);
}

TEST(ComputeForumFeatures, LengthAgreesWithCounts) {
  SeededRng rng(2);
  std::vector<std::string> paths;
  for (int u = 0; u < 50; ++u) paths.push_back(generate_coin_toss(1 + static_cast<std::int64_t>(rng.below(60)), 0.6, rng));
  const auto a = archive_from_symbols(paths);
  ForumCounts c{"f", static_cast<std::int64_t>(a.size()), 0, 0};
  for (const auto& [_, h] : a.users) {
    c.posts += h.path.posts();
    c.replies += h.path.replies();
  }
  const auto f = compute_forum_features(a);
  EXPECT_EQ(f.length, length_from_counts(c));
  EXPECT_EQ(f.base, baseline_from_counts(c));
  EXPECT_EQ(f.offset, f.slope - f.base);
}

TEST(ComputeForumFeatures, DuplicatingUserPullsSlopeTowardIt) {
  const std::string steep = "p" + repeat("rrp", 10), shallow = repeat("ppr", 10);
  const auto base = compute_forum_features(archive_from_symbols({steep, shallow})).slope;
  const auto more = compute_forum_features(archive_from_symbols({steep, steep, shallow})).slope;
  const auto own = fit_forum_slope(UserPath::from_symbols("u", steep).points()).slope;
  EXPECT_LT(std::abs(more - own), std::abs(base - own));
}

TEST(Counts, Table2Fixture) {
  std::ifstream in(FORUMPATHS_TEST_DATA_DIR "/table2_counts.csv");
  const auto rows = read_counts_csv(in);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_NEAR(baseline_from_counts(rows[0]), 0.9726, 1e-4);
  EXPECT_NEAR(length_from_counts(rows[1]), 117.36, 0.005);
}

TEST(SlopeInfluence, IdenticalTwinsHaveZeroInfluence) {
  const auto a = archive_from_symbols({"pprprr", "pprprr"});
  EXPECT_NEAR(slope_influence(a, "u0000"), 0.0, 1e-15);
  for (const auto& [_, v] : all_slope_influences(a)) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(SlopeInfluence, SpammerIsMostNegative) {
  std::vector<std::string> paths(100, repeat("pr", 50));
  paths.push_back(std::string(100, 'p'));
  const auto a = archive_from_symbols(paths);
  const auto all = all_slope_influences(a);
  const auto spammer = "u0100";
  for (const auto& [user, v] : all)
    if (user != spammer) EXPECT_LT(all.at(spammer), v);
  EXPECT_LT(all.at(spammer), 0.0);
}

TEST(SlopeInfluence, BatchMatchesDirectRecomputation) {
  SeededRng rng(3);
  std::vector<std::string> paths;
  for (int u = 0; u < 20; ++u) paths.push_back(generate_coin_toss(1 + static_cast<std::int64_t>(rng.below(40)), 0.6, rng));
  const auto a = archive_from_symbols(paths);
  const double full = fit_forum_slope(collect_points(a)).slope;
  for (const auto& [user, v] : all_slope_influences(a)) {
    ForumArchive without = a;
    without.users.erase(user);
    EXPECT_NEAR(v, full - fit_forum_slope(collect_points(without)).slope, 1e-12);
    EXPECT_NEAR(v, slope_influence(a, user), 1e-12);
  }
  EXPECT_THROW(slope_influence(a, "nobody"), std::invalid_argument);
  EXPECT_THROW(slope_influence(archive_from_symbols({"pr"}), "u0000"), std::invalid_argument);
}

TEST(FeaturesCsv, RoundTrip) {
  std::vector<NamedFeatures> rows{{"a", {10, 2.5, 0.9, 0.8, 0.1, 1.25, false}},
                                  {"b", {3, 1.0, 0.0, 0.5, -0.5, 0.75, true}}};
  std::ostringstream out;
  write_features_csv(out, rows);
  std::istringstream in(out.str());
  const auto back = read_features_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].forum, "a");
  EXPECT_EQ(back[0].features.size, 10);
  EXPECT_DOUBLE_EQ(back[1].features.offset, -0.5);
  EXPECT_DOUBLE_EQ(back[0].features.spread, 1.25);
}

TEST(FeaturesCsv, Table3FixtureSatisfiesOffsetIdentity) {
  std::ifstream in(FORUMPATHS_TEST_DATA_DIR "/table3_features.csv");
  const auto rows = read_features_csv(in);
  ASSERT_EQ(rows.size(), 9u);
  for (const auto& r : rows) EXPECT_NEAR(r.features.slope - r.features.base, r.features.offset, 0.015) << r.forum;
}

}  // namespace
}  // namespace forumpaths
