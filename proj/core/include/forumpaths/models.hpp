#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forumpaths/paths.hpp"
#include "forumpaths/rng.hpp"

namespace forumpaths {

struct UserModelParams {
  double p_post = 0.0;           // posts / (posts + replies)
  std::int64_t path_length = 0;  // L
};

/// Throws std::invalid_argument for an empty path.
UserModelParams estimate_p_post(const UserPath& path);

/// Bernoulli path: 'p' first, then L-1 independent symbols with
/// P('p') = p_post.
std::string generate_coin_toss(std::int64_t length, double p_post, SeededRng& rng);

/// Path that is pulled back toward the proportion p_post: after each
/// symbol the next one is 'p' with probability p_harsh while the running
/// post share is below p_post, 1 - p_harsh while above, and 0.5 when equal.
std::string generate_sticking(std::int64_t length, double p_post, double p_harsh, SeededRng& rng);

struct KsResult {
  double statistic = 0.0;  // D
  double p_value = 1.0;
};

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

/// Two-sample Kolmogorov-Smirnov test. The p-value uses the asymptotic
/// Kolmogorov distribution at sqrt(n_e) * D with n_e = n*m/(n+m); it is
/// conservative for discrete samples such as run lengths.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

enum class PathModel { coin, sticking };

PathModel parse_path_model(std::string_view name);
std::string_view to_string(PathModel model);

struct ModelFitOptions {
  PathModel model = PathModel::coin;
  std::int64_t min_length = 20;
  double alpha = 0.05;
  std::optional<double> p_harsh;  // required for the sticking model
  int replicates = 1;             // majority vote over synthetic paths
  std::uint64_t seed = 0;
};

struct UserFit {
  std::string user_id;
  double p_post = 0.0;
  std::int64_t length = 0;
  double ks_statistic = 0.0;
  double p_value = 1.0;
  bool passed = false;
};

struct ModelFitReport {
  std::vector<UserFit> users;
  std::size_t users_tested = 0;
  std::size_t users_passed = 0;
  PathModel model = PathModel::coin;
  std::optional<double> p_harsh;
  double alpha = 0.05;
};

/// Compares every user's post-run distribution (paths of length >=
/// min_length) against synthetic paths of the same length drawn from the
/// chosen model with the user's own p_post. A user passes when the KS test
/// does not reject at `alpha`. Each user draws from a stream derived from
/// (seed, user_id), so results do not depend on evaluation order.
ModelFitReport evaluate_model_fit(const ForumArchive& archive, const ModelFitOptions& options);

struct PHarshSearch {
  double best_p_harsh = 0.5;
  ModelFitReport best_report;
  std::vector<std::pair<double, std::size_t>> passed_by_value;  // grid order
};

/// 0.50, 0.55, ..., 0.95
std::vector<double> default_p_harsh_grid();

/// Grid search for the sticking model's p_harsh maximising the number of
/// passing users; ties go to the smallest value. Every grid value uses a
/// seed derived from (options.seed, value), so results for a value do not
/// depend on the rest of the grid.
PHarshSearch search_p_harsh(const ForumArchive& archive, std::span<const double> grid,
                            ModelFitOptions options);

void write_model_fit_csv(std::ostream& out, const ModelFitReport& report);

}  // namespace forumpaths
