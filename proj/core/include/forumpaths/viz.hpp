#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "forumpaths/cluster.hpp"
#include "forumpaths/features.hpp"

namespace forumpaths {

/// Number of distinct user paths through each lattice point of [0, M]^2,
/// with all paths aligned at the origin.
struct PathDensityGrid {
  std::int64_t extent = 0;
  std::int64_t users = 0;
  std::vector<std::int64_t> counts;  // index x * (extent + 1) + y

  std::int64_t at(std::int64_t x, std::int64_t y) const {
    return counts[static_cast<std::size_t>(x * (extent + 1) + y)];
  }
};

PathDensityGrid path_density_grid(const ForumArchive& archive);

/// x,y,count for every lattice point with a nonzero count.
void write_path_density_csv(std::ostream& out, const PathDensityGrid& grid);

struct PlotOptions {
  bool log_color = true;
  double canvas = 640.0;  // SVG width and height in px
  std::string title;
};

/// Heat map of path counts with the baseline ray (dashed), the slope ray
/// (solid) and a marker at the average path length measured along the
/// slope ray, x = length / (1 + slope). Throws DataError for a grid with
/// no users.
std::string render_forum_plot(const PathDensityGrid& grid, const ForumFeatures& features,
                              const PlotOptions& options = {});

/// Rectangular dendrogram with leaf labels and a height axis.
std::string render_dendrogram(const Dendrogram& dendrogram, const std::string& title = {});

}  // namespace forumpaths
