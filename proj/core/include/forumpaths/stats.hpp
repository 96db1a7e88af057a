#pragma once

#include <span>
#include <vector>

namespace forumpaths::stats {

double mean(std::span<const double> values);

/// Sample Pearson correlation. Throws UndefinedStatistic when either input
/// has zero variance, and std::invalid_argument on size mismatch or fewer
/// than two observations.
double pearson(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values receive the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman rank correlation: Pearson correlation of the average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace forumpaths::stats
