#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "forumpaths/features.hpp"

namespace forumpaths {

/// Gaussian kernel density sampled on the lattice square [0, M]^2.
class DensityGrid {
 public:
  DensityGrid() = default;
  DensityGrid(std::int64_t extent, double bandwidth, std::vector<double> values);

  std::int64_t extent() const noexcept { return extent_; }
  std::int64_t side() const noexcept { return extent_ + 1; }
  double bandwidth() const noexcept { return bandwidth_; }

  bool contains(const LatticePoint& p) const noexcept {
    return p.x >= 0 && p.y >= 0 && p.x <= extent_ && p.y <= extent_;
  }
  double at(std::int64_t x, std::int64_t y) const { return values_[index(x, y)]; }
  double at(const LatticePoint& p) const { return at(p.x, p.y); }

  // Row-major in x: index = x * side + y.
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t index(std::int64_t x, std::int64_t y) const {
    return static_cast<std::size_t>(x * side() + y);
  }

 private:
  std::int64_t extent_ = 0;
  double bandwidth_ = 0.0;
  std::vector<double> values_;
};

/// Isotropic Gaussian kernel sum (sigma = bandwidth in both axes) over the
/// points, evaluated on every lattice point of [0, M]^2 and normalized to
/// sum to one. M is the largest coordinate among the points in either axis,
/// raised to `min_extent` if that is larger. Throws DataError when empty.
///
/// Kernel tails beyond 10 sigma are dropped; their relative weight is
/// below 1e-21.
DensityGrid estimate_density(const PointCloud& points, double bandwidth = 2.0,
                             std::int64_t min_extent = 0);

struct DeadZoneResult {
  double threshold = 0.0;  // P_dz
  double percentile = 5.0;
  std::int64_t extent = 0;
  std::vector<bool> mask;            // grid layout; true => density < threshold
  std::vector<LatticePoint> outliers; // observed occurrences inside the mask

  bool in_mask(const LatticePoint& p) const {
    if (p.x < 0 || p.y < 0 || p.x > extent || p.y > extent) return false;
    return mask[static_cast<std::size_t>(p.x * (extent + 1) + p.y)];
  }
  std::size_t mask_size() const;
};

/// Threshold at the `percentile`-th nearest-rank percentile of the grid
/// densities at the observed point occurrences (with multiplicity): the
/// value of rank ceil(percentile/100 * n) in ascending order. Lattice
/// points strictly below it form the dead zone.
DeadZoneResult compute_dead_zone(const DensityGrid& grid, const PointCloud& observed,
                                 double percentile = 5.0);

/// Each user's path points that fall in the dead zone; users without such
/// points are omitted.
std::map<std::string, std::vector<LatticePoint>> flag_outlier_users(const ForumArchive& archive,
                                                                    const DeadZoneResult& result);

/// x,y,density,in_dead_zone for every lattice point.
void write_density_csv(std::ostream& out, const DensityGrid& grid, const DeadZoneResult& result);
/// user_id,x,y
void write_outliers_csv(std::ostream& out,
                        const std::map<std::string, std::vector<LatticePoint>>& outliers);

}  // namespace forumpaths
