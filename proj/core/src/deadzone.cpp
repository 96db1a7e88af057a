#include "forumpaths/deadzone.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "forumpaths/error.hpp"

namespace forumpaths {

DensityGrid::DensityGrid(std::int64_t extent, double bandwidth, std::vector<double> values)
    : extent_(extent), bandwidth_(bandwidth), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(side() * side()))
    throw std::invalid_argument("density grid size does not match its extent");
}

DensityGrid estimate_density(const PointCloud& points, double bandwidth, std::int64_t min_extent) {
  if (points.empty()) throw DataError("density estimate needs at least one point");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");

  std::int64_t extent = std::max<std::int64_t>(min_extent, 0);
  std::map<LatticePoint, double> weights;  // distinct points with multiplicity
  for (const auto& p : points) {
    if (p.x < 0 || p.y < 0) throw DataError("lattice points must have nonnegative coordinates");
    extent = std::max({extent, p.x, p.y});
    weights[p] += 1.0;
  }
  const std::int64_t side = extent + 1;
  const auto radius = std::min<std::int64_t>(extent, static_cast<std::int64_t>(std::ceil(10.0 * bandwidth)));

  std::vector<double> kernel(static_cast<std::size_t>(radius + 1));
  for (std::int64_t d = 0; d <= radius; ++d)
    kernel[static_cast<std::size_t>(d)] = std::exp(-0.5 * static_cast<double>(d * d) / (bandwidth * bandwidth));

  // Separable sum: smear every occupied column along y, then along x.
  std::map<std::int64_t, std::vector<double>> columns;  // x -> partial sums over y
  for (const auto& [p, w] : weights) {
    auto& col = columns[p.x];
    if (col.empty()) col.assign(static_cast<std::size_t>(side), 0.0);
    const auto y0 = std::max<std::int64_t>(0, p.y - radius);
    const auto y1 = std::min<std::int64_t>(extent, p.y + radius);
    for (auto y = y0; y <= y1; ++y) col[static_cast<std::size_t>(y)] += w * kernel[static_cast<std::size_t>(std::abs(y - p.y))];
  }

  std::vector<double> values(static_cast<std::size_t>(side * side), 0.0);
  for (const auto& [px, col] : columns) {
    const auto x0 = std::max<std::int64_t>(0, px - radius);
    const auto x1 = std::min<std::int64_t>(extent, px + radius);
    for (auto x = x0; x <= x1; ++x) {
      const double kx = kernel[static_cast<std::size_t>(std::abs(x - px))];
      double* row = values.data() + x * side;
      for (std::int64_t y = 0; y < side; ++y) row[y] += kx * col[static_cast<std::size_t>(y)];
    }
  }

  double total = 0.0;
  for (double v : values) total += v;
  for (double& v : values) v /= total;
  return DensityGrid(extent, bandwidth, std::move(values));
}

std::size_t DeadZoneResult::mask_size() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

DeadZoneResult compute_dead_zone(const DensityGrid& grid, const PointCloud& observed,
                                 double percentile) {
  if (!(percentile > 0.0 && percentile < 100.0))
    throw std::invalid_argument(fmt::format("percentile {} outside (0, 100)", percentile));
  if (observed.empty()) throw DataError("dead zone needs observed points");

  std::vector<double> at_observed;
  at_observed.reserve(observed.size());
  for (const auto& p : observed) {
    if (!grid.contains(p)) throw DataError("observed point lies outside the density grid");
    at_observed.push_back(grid.at(p));
  }
  std::sort(at_observed.begin(), at_observed.end());
  const auto n = static_cast<double>(at_observed.size());
  auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, at_observed.size());

  DeadZoneResult result;
  result.threshold = at_observed[rank - 1];
  result.percentile = percentile;
  result.extent = grid.extent();
  result.mask.resize(grid.values().size());
  for (std::size_t i = 0; i < grid.values().size(); ++i)
    result.mask[i] = grid.values()[i] < result.threshold;
  for (const auto& p : observed)
    if (grid.at(p) < result.threshold) result.outliers.push_back(p);
  return result;
}

std::map<std::string, std::vector<LatticePoint>> flag_outlier_users(const ForumArchive& archive,
                                                                    const DeadZoneResult& result) {
  std::map<std::string, std::vector<LatticePoint>> out;
  for (const auto& [user, history] : archive.users) {
    std::vector<LatticePoint> flagged;
    for (const auto& p : history.path.points())
      if (result.in_mask(p)) flagged.push_back(p);
    if (!flagged.empty()) out.emplace(user, std::move(flagged));
  }
  return out;
}

void write_density_csv(std::ostream& out, const DensityGrid& grid, const DeadZoneResult& result) {
  out << "x,y,density,in_dead_zone\n";
  for (std::int64_t x = 0; x <= grid.extent(); ++x)
    for (std::int64_t y = 0; y <= grid.extent(); ++y)
      out << fmt::format("{},{},{},{}\n", x, y, grid.at(x, y),
                         result.in_mask({x, y}) ? 1 : 0);
}

void write_outliers_csv(std::ostream& out,
                        const std::map<std::string, std::vector<LatticePoint>>& outliers) {
  out << "user_id,x,y\n";
  for (const auto& [user, pts] : outliers)
    for (const auto& p : pts) out << fmt::format("{},{},{}\n", user, p.x, p.y);
}

}  // namespace forumpaths
