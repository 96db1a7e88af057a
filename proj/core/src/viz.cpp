#include "forumpaths/viz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "forumpaths/error.hpp"

namespace forumpaths {
namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

struct Rgb {
  double r, g, b;
};

// Yellow-orange-red ramp, t in [0, 1].
std::string heat_color(double t) {
  static constexpr std::array<Rgb, 5> stops{{{255, 255, 204},
                                             {254, 217, 118},
                                             {253, 141, 60},
                                             {227, 26, 28},
                                             {128, 0, 38}}};
  t = std::clamp(t, 0.0, 1.0) * static_cast<double>(stops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(i);
  auto mix = [&](double a, double b) { return static_cast<int>(std::lround(a + (b - a) * f)); };
  return fmt::format("#{:02x}{:02x}{:02x}", mix(stops[i].r, stops[i + 1].r),
                     mix(stops[i].g, stops[i + 1].g), mix(stops[i].b, stops[i + 1].b));
}

// End of the ray y = slope * x inside [0, extent]^2.
std::pair<double, double> ray_end(double slope, double extent) {
  if (slope <= 1.0) return {extent, slope * extent};
  return {extent / slope, extent};
}

std::vector<double> nice_ticks(double max_value, int target = 5) {
  if (!(max_value > 0.0)) return {0.0};
  const double raw = max_value / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double v = 0.0; v <= max_value * (1.0 + 1e-9); v += step) ticks.push_back(v);
  return ticks;
}

std::string tick_label(double v) {
  if (std::abs(v - std::round(v)) < 1e-9) return fmt::format("{}", static_cast<long long>(std::llround(v)));
  return fmt::format("{:.2f}", v);
}

}  // namespace

PathDensityGrid path_density_grid(const ForumArchive& archive) {
  PathDensityGrid grid;
  for (const auto& [_, h] : archive.users) {
    const auto& end = h.path.points().back();
    grid.extent = std::max({grid.extent, end.x, end.y});
  }
  const auto side = grid.extent + 1;
  grid.counts.assign(static_cast<std::size_t>(side * side), 0);
  grid.users = static_cast<std::int64_t>(archive.size());
  // Lattice walks are strictly monotone, so a path never revisits a point.
  for (const auto& [_, h] : archive.users)
    for (const auto& p : h.path.points()) ++grid.counts[static_cast<std::size_t>(p.x * side + p.y)];
  return grid;
}

void write_path_density_csv(std::ostream& out, const PathDensityGrid& grid) {
  out << "x,y,count\n";
  for (std::int64_t x = 0; x <= grid.extent; ++x)
    for (std::int64_t y = 0; y <= grid.extent; ++y)
      if (const auto c = grid.at(x, y); c > 0) out << x << ',' << y << ',' << c << '\n';
}

std::string render_forum_plot(const PathDensityGrid& grid, const ForumFeatures& features,
                              const PlotOptions& options) {
  if (grid.users <= 0 || grid.counts.empty()) throw DataError("cannot plot an empty forum");

  const double margin_left = 60.0, margin_bottom = 50.0, margin_top = 40.0, legend_width = 150.0;
  const double plot = options.canvas - margin_left - legend_width;
  const double height = margin_top + plot + margin_bottom;
  const double side = static_cast<double>(grid.extent + 1);
  const double cell = plot / side;
  const double max_count = static_cast<double>(*std::max_element(grid.counts.begin(), grid.counts.end()));

  auto px = [&](double x) { return margin_left + (x + 0.5) * cell; };
  auto py = [&](double y) { return margin_top + plot - (y + 0.5) * cell; };

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
      "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\" font-size=\"11\">\n",
      options.canvas, height);
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"#ffffff\"/>\n",
                     options.canvas, height);
  if (!options.title.empty())
    svg += fmt::format("<text x=\"{:.2f}\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                       margin_left + plot / 2.0, xml_escape(options.title));

  svg += "<g class=\"cells\">\n";
  for (std::int64_t x = 0; x <= grid.extent; ++x) {
    for (std::int64_t y = 0; y <= grid.extent; ++y) {
      const auto c = grid.at(x, y);
      if (c == 0) continue;
      const double t = options.log_color ? std::log1p(static_cast<double>(c)) / std::log1p(max_count)
                                         : static_cast<double>(c) / max_count;
      svg += fmt::format(
          "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
          margin_left + static_cast<double>(x) * cell,
          margin_top + plot - static_cast<double>(y + 1) * cell, cell, cell, heat_color(t));
    }
  }
  svg += "</g>\n";

  // Axes and ticks.
  svg += fmt::format(
      "<g class=\"axes\" stroke=\"#000000\" fill=\"none\">\n"
      "<path d=\"M{0:.2f},{1:.2f} V{2:.2f} H{3:.2f}\"/>\n</g>\n",
      margin_left, margin_top, margin_top + plot, margin_left + plot);
  for (double v : nice_ticks(static_cast<double>(grid.extent))) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", px(v),
                       margin_top + plot + 16.0, tick_label(v));
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n",
                       margin_left - 6.0, py(v) + 4.0, tick_label(v));
  }
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">posts</text>\n",
                     margin_left + plot / 2.0, margin_top + plot + 38.0);
  svg += fmt::format(
      "<text x=\"16\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.2f})\">"
      "replies</text>\n",
      margin_top + plot / 2.0);

  const double extent = static_cast<double>(grid.extent);
  const auto [bx, by] = ray_end(features.base, extent);
  svg += fmt::format(
      "<line class=\"ray baseline\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
      "stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n",
      px(0), py(0), px(bx), py(by));
  const auto [sx, sy] = ray_end(features.slope, extent);
  svg += fmt::format(
      "<line class=\"ray slope\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
      "stroke=\"#d62728\" stroke-width=\"1.5\"/>\n",
      px(0), py(0), px(sx), py(sy));

  const double mx = features.length / (1.0 + features.slope);
  svg += fmt::format(
      "<circle class=\"mean-length\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"#1f77b4\" "
      "data-x=\"{:.6f}\"/>\n",
      px(mx), py(features.slope * mx), mx);

  // Legend: swatches are rectangles so the rays stay the only lines.
  const double lx = margin_left + plot + 16.0;
  double ly = margin_top + 4.0;
  auto legend_entry = [&](std::string_view color, std::string_view text) {
    svg += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"12\" height=\"4\" fill=\"{}\"/>"
        "<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n",
        lx, ly - 4.0, color, lx + 18.0, ly, xml_escape(text));
    ly += 18.0;
  };
  legend_entry("#d62728", fmt::format("baseline {:.2f} (dashed)", features.base));
  legend_entry("#d62728", fmt::format("slope {:.2f} (solid)", features.slope));
  legend_entry("#1f77b4", fmt::format("mean length {:.2f}", features.length));
  ly += 6.0;
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">paths per point ({})</text>\n", lx, ly,
                     options.log_color ? "log" : "linear");
  ly += 8.0;
  for (int i = 0; i <= 10; ++i) {
    svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"12\" height=\"10\" fill=\"{}\"/>\n", lx,
                       ly + (10 - i) * 10.0, heat_color(i / 10.0));
  }
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", lx + 18.0, ly + 9.0,
                     static_cast<long long>(max_count));
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">1</text>\n", lx + 18.0, ly + 109.0);

  if (features.degenerate_slope)
    svg += fmt::format(
        "<text class=\"warning\" x=\"{:.2f}\" y=\"{:.2f}\" fill=\"#d62728\">"
        "warning: degenerate slope (no replies)</text>\n",
        margin_left + 8.0, margin_top + 14.0);

  svg += "</svg>\n";
  return svg;
}

std::string render_dendrogram(const Dendrogram& dendrogram, const std::string& title) {
  const std::size_t n = dendrogram.leaf_count();
  if (n == 0 || dendrogram.merges.size() + 1 != n)
    throw std::invalid_argument("malformed dendrogram");

  // Leaf order from a depth-first walk starting at the root.
  std::vector<std::size_t> order;
  if (n == 1) {
    order.push_back(0);
  } else {
    std::vector<std::size_t> stack{2 * n - 2};
    while (!stack.empty()) {
      const auto id = stack.back();
      stack.pop_back();
      if (id < n) {
        order.push_back(id);
        continue;
      }
      const auto& m = dendrogram.merges[id - n];
      stack.push_back(m.second);
      stack.push_back(m.first);
    }
  }

  const double width = 640.0, height = 420.0;
  const double left = 70.0, right = 20.0, top = 40.0, bottom = 110.0;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  double max_h = 0.0;
  for (const auto& m : dendrogram.merges) max_h = std::max(max_h, m.height);
  const auto ticks = nice_ticks(max_h > 0.0 ? max_h : 1.0);
  const double axis_max = std::max(ticks.back(), max_h > 0.0 ? max_h : 1.0);

  std::vector<double> xpos(2 * n - 1, 0.0), ypos(2 * n - 1, top + plot_h);
  for (std::size_t i = 0; i < order.size(); ++i)
    xpos[order[i]] = left + plot_w * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  auto y_of = [&](double h) { return top + plot_h - plot_h * h / axis_max; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
      "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0:.0f}\" height=\"{1:.0f}\" fill=\"#ffffff\"/>\n",
      width, height);
  if (!title.empty())
    svg += fmt::format("<text x=\"{:.2f}\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                       left + plot_w / 2.0, xml_escape(title));

  svg += fmt::format("<path class=\"axis\" d=\"M{0:.2f},{1:.2f} V{2:.2f}\" stroke=\"#000000\" fill=\"none\"/>\n",
                     left - 10.0, top, top + plot_h);
  for (double t : ticks) {
    svg += fmt::format(
        "<path d=\"M{0:.2f},{1:.2f} H{2:.2f}\" stroke=\"#000000\"/>"
        "<text x=\"{3:.2f}\" y=\"{4:.2f}\" text-anchor=\"end\">{5}</text>\n",
        left - 14.0, y_of(t), left - 10.0, left - 16.0, y_of(t) + 4.0, tick_label(t));
  }
  svg += fmt::format(
      "<text x=\"16\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.2f})\">"
      "height</text>\n",
      top + plot_h / 2.0);

  svg += "<g class=\"brackets\" stroke=\"#1f3b73\" stroke-width=\"1.5\" fill=\"none\">\n";
  for (std::size_t i = 0; i < dendrogram.merges.size(); ++i) {
    const auto& m = dendrogram.merges[i];
    const double yh = y_of(m.height);
    svg += fmt::format("<path class=\"bracket\" data-height=\"{:g}\" d=\"M{:.2f},{:.2f} V{:.2f} H{:.2f} V{:.2f}\"/>\n",
                       m.height, xpos[m.first], ypos[m.first], yh, xpos[m.second], ypos[m.second]);
    xpos[n + i] = 0.5 * (xpos[m.first] + xpos[m.second]);
    ypos[n + i] = yh;
  }
  svg += "</g>\n";

  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    const double x = xpos[leaf], y = top + plot_h + 8.0;
    svg += fmt::format(
        "<text class=\"leaf\" x=\"{0:.2f}\" y=\"{1:.2f}\" text-anchor=\"end\" "
        "transform=\"rotate(-60 {0:.2f} {1:.2f})\">{2}</text>\n",
        x, y, xml_escape(dendrogram.labels[leaf]));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace forumpaths
