#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "forumpaths/paths.hpp"

namespace forumpaths {

/// Union of all path points of a forum, kept with multiplicity. Every user
/// contributes their origin point.
using PointCloud = std::vector<LatticePoint>;

PointCloud collect_points(const ForumArchive& archive);

struct SlopeFit {
  double slope = 0.0;
  bool degenerate = false;  // sum(xy) == 0, slope forced to 0
};

/// Least-squares slope of a line through the origin:
/// sum(x*y) / sum(x*x). Throws DataError when no point has x > 0.
SlopeFit fit_forum_slope(const PointCloud& points);

/// RMS vertical distance of the points from y = slope * x.
double compute_spread(const PointCloud& points, double slope);

struct ForumFeatures {
  std::int64_t size = 0;  // N, number of users
  double length = 0.0;    // mean path length
  double slope = 0.0;
  double base = 0.0;      // replies / posts
  double offset = 0.0;    // slope - base
  double spread = 0.0;
  bool degenerate_slope = false;
};

/// All six features over every path of the archive (no length filter).
/// Throws DataError on an empty archive or when there are no posts.
ForumFeatures compute_forum_features(const ForumArchive& archive);

/// Aggregate counts of a forum sample, as published in summary tables.
struct ForumCounts {
  std::string forum;
  std::int64_t users = 0;
  std::int64_t posts = 0;
  std::int64_t replies = 0;
};

double baseline_from_counts(const ForumCounts& counts);
double length_from_counts(const ForumCounts& counts);

/// Reads "forum,users,posts,replies" rows (header required).
std::vector<ForumCounts> read_counts_csv(std::istream& in);

/// Slope of the whole forum minus the slope with `user` removed. Throws
/// std::invalid_argument for fewer than two users or an unknown user, and
/// DataError when the remaining points have no x > 0.
double slope_influence(const ForumArchive& archive, const std::string& user);

/// slope_influence for every user, computed from shared sums in one pass.
std::map<std::string, double> all_slope_influences(const ForumArchive& archive);

struct NamedFeatures {
  std::string forum;
  ForumFeatures features;
};

/// Columns: forum,size,length,slope,base,offset,spread.
void write_features_csv(std::ostream& out, std::span<const NamedFeatures> rows);
std::vector<NamedFeatures> read_features_csv(std::istream& in);

}  // namespace forumpaths
