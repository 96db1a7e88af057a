#include "forumpaths/features.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "forumpaths/error.hpp"

namespace forumpaths {
namespace {

// Exact integer moments of a point set; lattice coordinates keep these
// well inside int64 for any realistic forum.
struct Moments {
  std::int64_t sxy = 0;
  std::int64_t sxx = 0;
  bool any_positive_x = false;

  void add(const LatticePoint& p) {
    sxy += p.x * p.y;
    sxx += p.x * p.x;
    any_positive_x = any_positive_x || p.x > 0;
  }
};

Moments path_moments(const UserPath& path) {
  Moments m;
  for (const auto& p : path.points()) m.add(p);
  return m;
}

double slope_from(std::int64_t sxy, std::int64_t sxx) {
  if (sxx == 0) throw DataError("slope undefined: no point with x > 0");
  return static_cast<double>(sxy) / static_cast<double>(sxx);
}

std::vector<std::string> split_simple_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double_or_nan(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw DataError(fmt::format("not a number: '{}'", s));
  return v;
}

std::string format_or_empty(double v) { return std::isnan(v) ? std::string() : fmt::format("{}", v); }

}  // namespace

PointCloud collect_points(const ForumArchive& archive) {
  PointCloud q;
  for (const auto& [_, history] : archive.users) {
    const auto& pts = history.path.points();
    q.insert(q.end(), pts.begin(), pts.end());
  }
  return q;
}

SlopeFit fit_forum_slope(const PointCloud& points) {
  Moments m;
  for (const auto& p : points) m.add(p);
  if (!m.any_positive_x) throw DataError("slope undefined: no point with x > 0");
  if (m.sxy == 0) return {0.0, true};
  return {slope_from(m.sxy, m.sxx), false};
}

double compute_spread(const PointCloud& points, double slope) {
  if (points.empty()) throw DataError("spread undefined for an empty point set");
  double ss = 0.0;
  for (const auto& p : points) {
    const double r = static_cast<double>(p.y) - slope * static_cast<double>(p.x);
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(points.size()));
}

ForumFeatures compute_forum_features(const ForumArchive& archive) {
  if (archive.empty()) throw DataError(fmt::format("forum '{}' has no users", archive.forum_id));
  std::int64_t posts = 0, replies = 0;
  for (const auto& [_, h] : archive.users) {
    posts += h.path.posts();
    replies += h.path.replies();
  }
  if (posts == 0) throw DataError(fmt::format("forum '{}' has no posts", archive.forum_id));

  const auto q = collect_points(archive);
  const auto fit = fit_forum_slope(q);

  ForumFeatures f;
  f.size = static_cast<std::int64_t>(archive.size());
  f.length = static_cast<double>(posts + replies) / static_cast<double>(f.size);
  f.base = static_cast<double>(replies) / static_cast<double>(posts);
  f.slope = fit.slope;
  f.degenerate_slope = fit.degenerate;
  f.offset = f.slope - f.base;
  f.spread = compute_spread(q, f.slope);
  return f;
}

double baseline_from_counts(const ForumCounts& counts) {
  if (counts.posts <= 0) throw DataError(fmt::format("forum '{}' has no posts", counts.forum));
  return static_cast<double>(counts.replies) / static_cast<double>(counts.posts);
}

double length_from_counts(const ForumCounts& counts) {
  if (counts.users <= 0) throw DataError(fmt::format("forum '{}' has no users", counts.forum));
  return static_cast<double>(counts.posts + counts.replies) / static_cast<double>(counts.users);
}

std::vector<ForumCounts> read_counts_csv(std::istream& in) {
  std::vector<ForumCounts> rows;
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_simple_csv(line);
    if (header) {
      if (f.size() < 4 || f[0] != "forum" || f[1] != "users" || f[2] != "posts" || f[3] != "replies")
        throw DataError("counts CSV header must be forum,users,posts,replies");
      header = false;
      continue;
    }
    if (f.size() < 4) throw DataError(fmt::format("counts CSV line {}: too few fields", line_no));
    try {
      rows.push_back({f[0], std::stoll(f[1]), std::stoll(f[2]), std::stoll(f[3])});
    } catch (const std::logic_error&) {
      throw DataError(fmt::format("counts CSV line {}: bad integer", line_no));
    }
  }
  return rows;
}

double slope_influence(const ForumArchive& archive, const std::string& user) {
  if (archive.size() < 2) throw std::invalid_argument("slope influence needs at least two users");
  auto it = archive.users.find(user);
  if (it == archive.users.end())
    throw std::invalid_argument(fmt::format("unknown user '{}'", user));
  Moments all;
  for (const auto& [_, h] : archive.users)
    for (const auto& p : h.path.points()) all.add(p);
  const auto mine = path_moments(it->second.path);
  return slope_from(all.sxy, all.sxx) - slope_from(all.sxy - mine.sxy, all.sxx - mine.sxx);
}

std::map<std::string, double> all_slope_influences(const ForumArchive& archive) {
  if (archive.size() < 2) throw std::invalid_argument("slope influence needs at least two users");
  std::map<std::string, Moments> per_user;
  Moments all;
  for (const auto& [user, h] : archive.users) {
    auto m = path_moments(h.path);
    all.sxy += m.sxy;
    all.sxx += m.sxx;
    per_user.emplace(user, m);
  }
  const double full = slope_from(all.sxy, all.sxx);
  std::map<std::string, double> out;
  for (const auto& [user, m] : per_user)
    out.emplace(user, full - slope_from(all.sxy - m.sxy, all.sxx - m.sxx));
  return out;
}

void write_features_csv(std::ostream& out, std::span<const NamedFeatures> rows) {
  out << "forum,size,length,slope,base,offset,spread\n";
  for (const auto& r : rows) {
    const auto& f = r.features;
    out << fmt::format("{},{},{},{},{},{},{}\n", r.forum, f.size, format_or_empty(f.length),
                       format_or_empty(f.slope), format_or_empty(f.base),
                       format_or_empty(f.offset), format_or_empty(f.spread));
  }
}

std::vector<NamedFeatures> read_features_csv(std::istream& in) {
  std::vector<NamedFeatures> rows;
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto f = split_simple_csv(line);
    if (header) {
      const std::vector<std::string> expected{"forum", "size",   "length", "slope",
                                              "base",  "offset", "spread"};
      if (f != expected)
        throw DataError("features CSV header must be forum,size,length,slope,base,offset,spread");
      header = false;
      continue;
    }
    if (f.size() != 7) throw DataError(fmt::format("features CSV line {}: expected 7 fields", line_no));
    try {
      NamedFeatures row;
      row.forum = f[0];
      row.features.size = std::stoll(f[1]);
      row.features.length = parse_double_or_nan(f[2]);
      row.features.slope = parse_double_or_nan(f[3]);
      row.features.base = parse_double_or_nan(f[4]);
      row.features.offset = parse_double_or_nan(f[5]);
      row.features.spread = parse_double_or_nan(f[6]);
      rows.push_back(std::move(row));
    } catch (const std::logic_error&) {
      throw DataError(fmt::format("features CSV line {}: bad number", line_no));
    }
  }
  return rows;
}

}  // namespace forumpaths
