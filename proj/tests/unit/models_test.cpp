#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "forumpaths/models.hpp"
#include "forumpaths/rng.hpp"
#include "oracles.hpp"

namespace forumpaths {
namespace {

TEST(EstimatePPost, Examples) {
  auto est = estimate_p_post(UserPath::from_symbols("u", "pprp"));
  EXPECT_DOUBLE_EQ(est.p_post, 0.75);
  EXPECT_EQ(est.path_length, 4);
  EXPECT_DOUBLE_EQ(estimate_p_post(UserPath::from_symbols("u", "p")).p_post, 1.0);
  EXPECT_DOUBLE_EQ(estimate_p_post(UserPath::from_symbols("u", "prprpr")).p_post, 0.5);
  EXPECT_THROW(estimate_p_post(UserPath{}), std::invalid_argument);
}

TEST(CoinToss, ForcedFirstSymbolAndLength) {
  SeededRng rng(1);
  EXPECT_EQ(generate_coin_toss(1, 0.3, rng), "p");
  EXPECT_EQ(generate_coin_toss(7, 1.0, rng), "ppppppp");
  for (int i = 0; i < 200; ++i) {
    const auto len = 1 + static_cast<std::int64_t>(rng.below(50));
    const auto s = generate_coin_toss(len, rng.uniform(), rng);
    EXPECT_EQ(static_cast<std::int64_t>(s.size()), len);
    EXPECT_EQ(s.front(), 'p');
  }
}

TEST(CoinToss, RecoversPPost) {
  SeededRng rng(2);
  const auto s = generate_coin_toss(10000, 0.75, rng);
  const double frac = static_cast<double>(std::count(s.begin() + 1, s.end(), 'p')) / 9999.0;
  EXPECT_NEAR(frac, 0.75, 0.02);
  EXPECT_NEAR(estimate_p_post(UserPath::from_symbols("u", s)).p_post, 0.75, 0.02);
}

// Every string Algorithm-1 can emit when p_harsh = 1: the only branching
// happens when the running share equals p_post.
std::set<std::string> reachable_with_full_harshness(int length, double p_post) {
  std::set<std::string> out;
  std::function<void(std::string)> grow = [&](std::string s) {
    if (static_cast<int>(s.size()) == length) {
      out.insert(s);
      return;
    }
    const double share = static_cast<double>(std::count(s.begin(), s.end(), 'p')) / static_cast<double>(s.size());
    if (p_post > share) {
      grow(s + 'p');
    } else if (p_post < share) {
      grow(s + 'r');
    } else {
      grow(s + 'p');
      grow(s + 'r');
    }
  };
  grow("p");
  return out;
}

TEST(Sticking, FullHarshnessStaysWithinOneStep) {
  for (double p_post : {0.5, 0.6, 0.75, 0.3}) {
    const auto reachable = reachable_with_full_harshness(12, p_post);
    for (const auto& s : reachable) {
      std::int64_t posts = 0;
      for (std::size_t n = 1; n <= s.size(); ++n) {
        posts += s[n - 1] == 'p';
        EXPECT_LE(std::abs(static_cast<double>(posts) - p_post * static_cast<double>(n)), 1.0) << s;
      }
    }
    SeededRng rng(17);
    for (int i = 0; i < 500; ++i) EXPECT_TRUE(reachable.count(generate_sticking(12, p_post, 1.0, rng)));
  }
  // With p_post = 0.5 the walk branches whenever the share is exactly one half.
  const auto half = reachable_with_full_harshness(6, 0.5);
  EXPECT_EQ(half, (std::set<std::string>{"prprpr", "prprrp", "prrppr", "prrprp"}));
}

TEST(Sticking, ForcedFirstSymbolAndLength) {
  SeededRng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto len = 1 + static_cast<std::int64_t>(rng.below(50));
    const auto s = generate_sticking(len, rng.uniform(), rng.uniform(), rng);
    EXPECT_EQ(static_cast<std::int64_t>(s.size()), len);
    EXPECT_EQ(s.front(), 'p');
  }
}

TEST(Sticking, TrackingIsTighterThanCoinToss) {
  SeededRng rng(4);
  const auto s = generate_sticking(10000, 0.75, 0.8, rng);
  EXPECT_NEAR(estimate_p_post(UserPath::from_symbols("u", s)).p_post, 0.75, 0.01);

  auto spread = [&](auto gen) {
    double sum = 0, sq = 0;
    for (int i = 0; i < 2000; ++i) {
      const auto path = gen();
      const double f = static_cast<double>(std::count(path.begin(), path.end(), 'p')) / 100.0;
      sum += f;
      sq += f * f;
    }
    return sq / 2000 - (sum / 2000) * (sum / 2000);
  };
  const double sticking = spread([&] { return generate_sticking(100, 0.75, 0.8, rng); });
  const double coin = spread([&] { return generate_coin_toss(100, 0.75, rng); });
  EXPECT_LT(sticking, coin / 4);
}

TEST(Sticking, HalfHarshnessMatchesFairCoin) {
  constexpr int kPaths = 100000, kLen = 20;
  SeededRng a(5), b(6);
  std::vector<int> sticking(kLen, 0), coin(kLen, 0);
  for (int i = 0; i < kPaths; ++i) {
    const auto s = generate_sticking(kLen, 0.5, 0.5, a);
    const auto c = generate_coin_toss(kLen, 0.5, b);
    for (int k = 0; k < kLen; ++k) {
      sticking[k] += s[k] == 'p';
      coin[k] += c[k] == 'p';
    }
  }
  for (int k = 1; k < kLen; ++k) {
    const double ps = sticking[k] / double(kPaths), pc = coin[k] / double(kPaths);
    const double se = std::sqrt((ps * (1 - ps) + pc * (1 - pc)) / kPaths);
    EXPECT_LE(std::abs(ps - pc), 3 * se) << "position " << k;
  }
}

TEST(KsTwoSample, Examples) {
  const std::vector<double> a{1, 2, 3};
  auto r = ks_two_sample(a, a);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);

  EXPECT_EQ(ks_two_sample(std::vector<double>{1, 1, 1}, std::vector<double>{5, 5, 5}).statistic, 1.0);
  EXPECT_DOUBLE_EQ(ks_two_sample(std::vector<double>{1, 2, 3, 4}, std::vector<double>{3, 4, 5, 6}).statistic, 0.5);
  EXPECT_THROW(ks_two_sample(std::vector<double>{}, a), std::invalid_argument);
}

TEST(KsTwoSample, SymmetricAndMatchesBruteForce) {
  SeededRng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(1 + rng.below(30)), b(1 + rng.below(30));
    for (auto& v : a) v = static_cast<double>(rng.below(8));
    for (auto& v : b) v = static_cast<double>(rng.below(8)) + (trial % 3 == 0);
    const auto ab = ks_two_sample(a, b), ba = ks_two_sample(b, a);
    EXPECT_DOUBLE_EQ(ab.statistic, ba.statistic);
    EXPECT_DOUBLE_EQ(ab.p_value, ba.p_value);
    EXPECT_NEAR(ab.statistic, testing::brute_force_ks_statistic(a, b), 1e-12);
    EXPECT_GE(ab.p_value, 0.0);
    EXPECT_LE(ab.p_value, 1.0);
  }
}

TEST(KsTwoSample, ZeroStatisticIffSameEmpiricalCdf) {
  const std::vector<double> a{1, 2, 2, 3}, b{3, 2, 1, 2, 1, 2, 3, 2};
  EXPECT_EQ(ks_two_sample(a, b).statistic, 0.0);
  const std::vector<double> c{1, 2, 3, 3};
  EXPECT_GT(ks_two_sample(a, c).statistic, 0.0);
}

TEST(KolmogorovSurvival, KnownValues) {
  EXPECT_NEAR(kolmogorov_survival(1.358), 0.05, 5e-4);
  EXPECT_NEAR(kolmogorov_survival(1.628), 0.01, 2e-4);
  EXPECT_DOUBLE_EQ(kolmogorov_survival(0.0), 1.0);
  EXPECT_LT(kolmogorov_survival(5.0), 1e-20);
}

TEST(EvaluateModelFit, ShortPathsAreNotTested) {
  const auto archive = testing::archive_from_symbols({"prp", "ppppprrrr", std::string(19, 'p')});
  const auto report = evaluate_model_fit(archive, {});
  EXPECT_EQ(report.users_tested, 0u);
  EXPECT_EQ(report.users_passed, 0u);
}

TEST(EvaluateModelFit, StickingNeedsPHarsh) {
  ModelFitOptions options;
  options.model = PathModel::sticking;
  EXPECT_THROW(evaluate_model_fit(testing::archive_from_symbols({"pp"}), options), std::invalid_argument);
}

ForumArchive coin_archive(int users, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<std::string> paths;
  for (int i = 0; i < users; ++i) paths.push_back(generate_coin_toss(100, 0.6, rng));
  return testing::archive_from_symbols(paths);
}

TEST(EvaluateModelFit, DeterministicPerSeed) {
  const auto archive = coin_archive(40, 1);
  ModelFitOptions options;
  options.seed = 3;
  const auto a = evaluate_model_fit(archive, options), b = evaluate_model_fit(archive, options);
  ASSERT_EQ(a.users.size(), b.users.size());
  for (std::size_t i = 0; i < a.users.size(); ++i) EXPECT_EQ(a.users[i].p_value, b.users[i].p_value);
  EXPECT_EQ(a.users_tested, 40u);
  EXPECT_GE(a.users_passed, 34u);
}

TEST(EvaluateModelFit, UserResultDoesNotDependOnOtherUsers) {
  const auto full = coin_archive(30, 2);
  ForumArchive half;
  half.users.insert(*full.users.rbegin());
  ModelFitOptions options;
  options.seed = 4;
  const auto a = evaluate_model_fit(full, options), b = evaluate_model_fit(half, options);
  ASSERT_EQ(b.users.size(), 1u);
  EXPECT_EQ(a.users.back().p_value, b.users.front().p_value);
}

TEST(EvaluateModelFit, ReplicatesUseMajorityVote) {
  const auto archive = coin_archive(20, 5);
  ModelFitOptions options;
  options.replicates = 5;
  const auto report = evaluate_model_fit(archive, options);
  EXPECT_EQ(report.users_tested, 20u);
  EXPECT_THROW(evaluate_model_fit(archive, {PathModel::coin, 20, 0.05, std::nullopt, 0, 0}), std::invalid_argument);
}

TEST(SearchPHarsh, SingleValueGrid) {
  const auto archive = coin_archive(10, 6);
  const std::vector<double> grid{0.5};
  const auto s = search_p_harsh(archive, grid, {});
  EXPECT_EQ(s.best_p_harsh, 0.5);
  ASSERT_EQ(s.passed_by_value.size(), 1u);
  EXPECT_EQ(s.best_report.p_harsh, 0.5);
}

TEST(SearchPHarsh, DefaultGrid) {
  const auto g = default_p_harsh_grid();
  ASSERT_EQ(g.size(), 10u);
  EXPECT_DOUBLE_EQ(g.front(), 0.5);
  EXPECT_DOUBLE_EQ(g.back(), 0.95);
}

TEST(SearchPHarsh, ValueResultIndependentOfGrid) {
  const auto archive = coin_archive(15, 7);
  const std::vector<double> wide{0.5, 0.7, 0.9}, narrow{0.7};
  const auto a = search_p_harsh(archive, wide, {}), b = search_p_harsh(archive, narrow, {});
  EXPECT_EQ(a.passed_by_value[1].second, b.passed_by_value[0].second);
}

TEST(ModelFitCsv, HasHeaderAndRows) {
  const auto report = evaluate_model_fit(coin_archive(3, 8), {});
  std::ostringstream out;
  write_model_fit_csv(out, report);
  const auto text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

}  // namespace
}  // namespace forumpaths
