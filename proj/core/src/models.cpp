#include "forumpaths/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace forumpaths {
namespace {

void check_generator_args(std::int64_t length, double p_post) {
  if (length < 1) throw std::invalid_argument(fmt::format("path length {} < 1", length));
  if (!(p_post >= 0.0 && p_post <= 1.0))
    throw std::invalid_argument(fmt::format("p_post {} outside [0, 1]", p_post));
}

std::vector<double> runs_as_doubles(const std::vector<std::int64_t>& runs) {
  return {runs.begin(), runs.end()};
}

std::string generate(PathModel model, std::int64_t length, double p_post,
                     const std::optional<double>& p_harsh, SeededRng& rng) {
  return model == PathModel::coin ? generate_coin_toss(length, p_post, rng)
                                  : generate_sticking(length, p_post, *p_harsh, rng);
}

std::uint64_t grid_value_key(double value) {
  return static_cast<std::uint64_t>(std::llround(value * 1e6));
}

}  // namespace

UserModelParams estimate_p_post(const UserPath& path) {
  if (path.empty()) throw std::invalid_argument("cannot estimate p_post of an empty path");
  const auto length = static_cast<std::int64_t>(path.length());
  return {static_cast<double>(path.posts()) / static_cast<double>(length), length};
}

std::string generate_coin_toss(std::int64_t length, double p_post, SeededRng& rng) {
  check_generator_args(length, p_post);
  std::string s(static_cast<std::size_t>(length), 'r');
  s[0] = 'p';
  for (std::size_t i = 1; i < s.size(); ++i)
    if (rng.bernoulli(p_post)) s[i] = 'p';
  return s;
}

std::string generate_sticking(std::int64_t length, double p_post, double p_harsh,
                              SeededRng& rng) {
  check_generator_args(length, p_post);
  if (!(p_harsh >= 0.0 && p_harsh <= 1.0))
    throw std::invalid_argument(fmt::format("p_harsh {} outside [0, 1]", p_harsh));
  std::string s(static_cast<std::size_t>(length), 'r');
  s[0] = 'p';
  std::int64_t posts = 1;
  double current_share = 1.0;
  for (std::int64_t n = 2; n <= length; ++n) {
    double p_next = 0.5;
    if (p_post > current_share)
      p_next = p_harsh;
    else if (p_post < current_share)
      p_next = 1.0 - p_harsh;
    if (rng.bernoulli(p_next)) {
      s[static_cast<std::size_t>(n - 1)] = 'p';
      ++posts;
    }
    current_share = static_cast<double>(posts) / static_cast<double>(n);
  }
  return s;
}

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.18) {
    // P(K <= lambda) = sqrt(2 pi)/lambda * sum_k exp(-(2k-1)^2 pi^2 / (8 lambda^2))
    const double a = -pi * pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double term = std::exp(a * (2 * k - 1) * (2 * k - 1));
      cdf += term;
      if (term < 1e-17 * cdf) break;
    }
    cdf *= std::sqrt(2.0 * pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  // 2 sum_k (-1)^(k-1) exp(-2 k^2 lambda^2)
  double q = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two nonempty samples");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());

  // Walk both sorted samples, evaluating the CDF gap after each distinct value.
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  return {d, kolmogorov_survival(std::sqrt(ne) * d)};
}

PathModel parse_path_model(std::string_view name) {
  if (name == "coin") return PathModel::coin;
  if (name == "sticking") return PathModel::sticking;
  throw std::invalid_argument(fmt::format("unknown path model '{}'", name));
}

std::string_view to_string(PathModel model) {
  return model == PathModel::coin ? "coin" : "sticking";
}

ModelFitReport evaluate_model_fit(const ForumArchive& archive, const ModelFitOptions& options) {
  if (options.model == PathModel::sticking && !options.p_harsh)
    throw std::invalid_argument("the sticking model requires p_harsh");
  if (options.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (!(options.alpha > 0.0 && options.alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");

  ModelFitReport report;
  report.model = options.model;
  report.alpha = options.alpha;
  if (options.model == PathModel::sticking) report.p_harsh = options.p_harsh;

  const SeededRng base(options.seed);
  for (const auto& [user, history] : archive.users) {
    const auto& path = history.path;
    if (static_cast<std::int64_t>(path.length()) < options.min_length) continue;
    const auto params = estimate_p_post(path);
    const auto observed = runs_as_doubles(post_runs(path));

    auto stream = base.derive(user);
    std::vector<KsResult> trials;
    trials.reserve(static_cast<std::size_t>(options.replicates));
    int votes = 0;
    for (int r = 0; r < options.replicates; ++r) {
      const auto synthetic = UserPath::from_symbols(
          user, generate(options.model, params.path_length, params.p_post, options.p_harsh, stream));
      trials.push_back(ks_two_sample(observed, runs_as_doubles(post_runs(synthetic))));
      if (trials.back().p_value >= options.alpha) ++votes;
    }
    // Report the replicate with the (lower) median p-value.
    std::sort(trials.begin(), trials.end(),
              [](const KsResult& x, const KsResult& y) { return x.p_value < y.p_value; });
    const auto& rep = trials[(trials.size() - 1) / 2];

    UserFit fit{user, params.p_post, params.path_length, rep.statistic, rep.p_value,
                2 * votes > options.replicates};
    ++report.users_tested;
    if (fit.passed) ++report.users_passed;
    report.users.push_back(std::move(fit));
  }
  return report;
}

std::vector<double> default_p_harsh_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(0.5 + 0.05 * i);
  return grid;
}

PHarshSearch search_p_harsh(const ForumArchive& archive, std::span<const double> grid,
                            ModelFitOptions options) {
  if (grid.empty()) throw std::invalid_argument("p_harsh grid is empty");
  const std::uint64_t base_seed = options.seed;
  options.model = PathModel::sticking;

  PHarshSearch result;
  bool have_best = false;
  for (double value : grid) {
    options.p_harsh = value;
    options.seed = derive_seed(base_seed, grid_value_key(value));
    auto report = evaluate_model_fit(archive, options);
    result.passed_by_value.emplace_back(value, report.users_passed);
    const bool better =
        !have_best || report.users_passed > result.best_report.users_passed ||
        (report.users_passed == result.best_report.users_passed && value < result.best_p_harsh);
    if (better) {
      result.best_p_harsh = value;
      result.best_report = std::move(report);
      have_best = true;
    }
  }
  return result;
}

void write_model_fit_csv(std::ostream& out, const ModelFitReport& report) {
  out << "user_id,p_post,length,ks_statistic,p_value,passed\n";
  for (const auto& u : report.users)
    out << fmt::format("{},{},{},{},{},{}\n", u.user_id, u.p_post, u.length, u.ks_statistic,
                       u.p_value, u.passed ? 1 : 0);
}

}  // namespace forumpaths
