#include "forumpaths/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "forumpaths/error.hpp"

namespace forumpaths {
namespace {

double column_value(const ForumFeatures& f, FeatureColumn c) {
  switch (c) {
    case FeatureColumn::size:
      return static_cast<double>(f.size);
    case FeatureColumn::length:
      return f.length;
    case FeatureColumn::base:
      return f.base;
    case FeatureColumn::offset:
      return f.offset;
    case FeatureColumn::spread:
      return f.spread;
  }
  throw std::logic_error("unhandled feature column");
}

double sample_variance(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

std::string newick_label(const std::string& label) {
  if (label.find_first_of(" ()[]':;,\t") == std::string::npos && !label.empty()) return label;
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

}  // namespace

std::string_view to_string(FeatureColumn column) {
  switch (column) {
    case FeatureColumn::size:
      return "size";
    case FeatureColumn::length:
      return "length";
    case FeatureColumn::base:
      return "base";
    case FeatureColumn::offset:
      return "offset";
    case FeatureColumn::spread:
      return "spread";
  }
  return "?";
}

FeatureColumn parse_feature_column(std::string_view name) {
  for (auto c : default_cluster_columns())
    if (to_string(c) == name) return c;
  if (name == "slope")
    throw std::invalid_argument("the slope feature is not used for clustering");
  throw std::invalid_argument(fmt::format("unknown feature column '{}'", name));
}

std::vector<FeatureColumn> default_cluster_columns() {
  return {FeatureColumn::size, FeatureColumn::length, FeatureColumn::base, FeatureColumn::offset,
          FeatureColumn::spread};
}

std::vector<FeatureColumn> baseline_only_columns() {
  return {FeatureColumn::size, FeatureColumn::length, FeatureColumn::base, FeatureColumn::spread};
}

std::string_view to_string(NormalizationMode mode) {
  return mode == NormalizationMode::by_variance ? "by_variance" : "by_stddev";
}

NormalizationMode parse_normalization_mode(std::string_view name) {
  if (name == "by_variance") return NormalizationMode::by_variance;
  if (name == "by_stddev") return NormalizationMode::by_stddev;
  throw std::invalid_argument(fmt::format("unknown normalization mode '{}'", name));
}

std::string_view to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::ward:
      return "ward";
    case Linkage::single:
      return "single";
    case Linkage::average:
      return "average";
  }
  return "?";
}

Linkage parse_linkage(std::string_view name) {
  if (name == "ward") return Linkage::ward;
  if (name == "single") return Linkage::single;
  if (name == "average") return Linkage::average;
  throw std::invalid_argument(fmt::format("unknown linkage '{}'", name));
}

FeatureMatrix normalize_feature_matrix(std::span<const NamedFeatures> raw,
                                       std::span<const FeatureColumn> columns,
                                       NormalizationMode mode) {
  if (raw.size() < 2) throw std::invalid_argument("normalization needs at least two forums");
  if (columns.empty()) throw std::invalid_argument("no feature columns selected");

  auto dispersion_of = [&](FeatureColumn c) {
    std::vector<double> v;
    v.reserve(raw.size());
    for (const auto& r : raw) {
      const double x = column_value(r.features, c);
      if (!std::isfinite(x))
        throw DataError(fmt::format("forum '{}' has no value for '{}'", r.forum, to_string(c)));
      v.push_back(x);
    }
    const double var = sample_variance(v);
    const double d = mode == NormalizationMode::by_variance ? var : std::sqrt(var);
    if (!(d > 0.0))
      throw DataError(fmt::format("feature '{}' has zero dispersion", to_string(c)));
    return d;
  };

  FeatureMatrix m;
  m.mode = mode;
  m.columns.assign(columns.begin(), columns.end());
  for (const auto& r : raw) m.rows.push_back(r.forum);

  std::vector<double> divisor;
  for (auto c : columns)
    divisor.push_back(dispersion_of(c == FeatureColumn::offset ? FeatureColumn::base : c));

  m.values.reserve(raw.size() * columns.size());
  for (const auto& r : raw) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const double x = column_value(r.features, columns[j]);
      if (!std::isfinite(x))
        throw DataError(fmt::format("forum '{}' has no value for '{}'", r.forum, to_string(columns[j])));
      m.values.push_back(x / divisor[j]);
    }
  }
  return m;
}

Dendrogram hierarchical_clustering(const FeatureMatrix& matrix, Linkage linkage) {
  const std::size_t n = matrix.row_count();
  if (n < 2) throw std::invalid_argument("clustering needs at least two rows");
  const std::size_t dims = matrix.column_count();

  // dist[i][j]: squared Euclidean for Ward, Euclidean otherwise. Slot i
  // holds the active cluster whose smallest row index is i.
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double ss = 0.0;
      for (std::size_t c = 0; c < dims; ++c) {
        const double d = matrix.at(i, c) - matrix.at(j, c);
        ss += d * d;
      }
      const double v = linkage == Linkage::ward ? ss : std::sqrt(ss);
      dist[i * n + j] = dist[j * n + i] = v;
    }

  std::vector<bool> active(n, true);
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), std::size_t{0});

  Dendrogram out;
  out.labels = matrix.rows;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t best_a = 0, best_b = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!active[b]) continue;
        if (dist[a * n + b] < best) {
          best = dist[a * n + b];
          best_a = a;
          best_b = b;
        }
      }
    }

    const double na = static_cast<double>(size[best_a]);
    const double nb = static_cast<double>(size[best_b]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == best_a || k == best_b) continue;
      const double dka = dist[k * n + best_a];
      const double dkb = dist[k * n + best_b];
      double updated = 0.0;
      switch (linkage) {
        case Linkage::ward: {
          const double nk = static_cast<double>(size[k]);
          updated = ((na + nk) * dka + (nb + nk) * dkb - nk * best) / (na + nb + nk);
          break;
        }
        case Linkage::single:
          updated = std::min(dka, dkb);
          break;
        case Linkage::average:
          updated = (na * dka + nb * dkb) / (na + nb);
          break;
      }
      dist[k * n + best_a] = dist[best_a * n + k] = updated;
    }

    const double height = linkage == Linkage::ward ? std::sqrt(std::max(best, 0.0)) : best;
    out.merges.push_back({std::min(id[best_a], id[best_b]), std::max(id[best_a], id[best_b]),
                          height, size[best_a] + size[best_b]});
    size[best_a] += size[best_b];
    id[best_a] = n + step;
    active[best_b] = false;
  }
  return out;
}

std::vector<std::size_t> cut_dendrogram(const Dendrogram& dendrogram, std::size_t k) {
  const std::size_t n = dendrogram.leaf_count();
  if (k < 1 || k > n) throw std::invalid_argument(fmt::format("k = {} outside [1, {}]", k, n));

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // A representative leaf for every cluster id.
  std::vector<std::size_t> leaf_of(2 * n - 1);
  std::iota(leaf_of.begin(), leaf_of.begin() + static_cast<std::ptrdiff_t>(n), std::size_t{0});
  for (std::size_t i = 0; i < dendrogram.merges.size(); ++i) {
    const auto& m = dendrogram.merges[i];
    const auto ra = find(leaf_of[m.first]);
    const auto rb = find(leaf_of[m.second]);
    leaf_of[n + i] = std::min(ra, rb);
    if (i < n - k) parent[std::max(ra, rb)] = std::min(ra, rb);
  }

  std::vector<std::size_t> label(n);
  std::vector<std::size_t> root_label(n, n);
  std::size_t next = 0;
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    const auto r = find(leaf);
    if (root_label[r] == n) root_label[r] = next++;
    label[leaf] = root_label[r];
  }
  return label;
}

std::string dendrogram_to_json(const Dendrogram& dendrogram) {
  nlohmann::ordered_json doc;
  doc["labels"] = dendrogram.labels;
  doc["merges"] = nlohmann::ordered_json::array();
  for (const auto& m : dendrogram.merges) {
    nlohmann::ordered_json row;
    row["first"] = m.first;
    row["second"] = m.second;
    row["height"] = m.height;
    row["size"] = m.size;
    doc["merges"].push_back(std::move(row));
  }
  return doc.dump(2);
}

std::string dendrogram_to_newick(const Dendrogram& dendrogram) {
  const std::size_t n = dendrogram.leaf_count();
  auto height_of = [&](std::size_t id) { return id < n ? 0.0 : dendrogram.merges[id - n].height; };
  // Iterative post-order to build subtree strings bottom-up.
  std::vector<std::string> text(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) text[i] = newick_label(dendrogram.labels[i]);
  for (std::size_t i = 0; i < dendrogram.merges.size(); ++i) {
    const auto& m = dendrogram.merges[i];
    text[n + i] = fmt::format("({}:{},{}:{})", text[m.first], m.height - height_of(m.first),
                              text[m.second], m.height - height_of(m.second));
  }
  return (n == 1 ? text[0] : text[2 * n - 2]) + ";";
}

void write_partition_csv(std::ostream& out, const Dendrogram& dendrogram,
                         std::span<const std::size_t> partition) {
  out << "forum,cluster_id\n";
  for (std::size_t i = 0; i < dendrogram.labels.size(); ++i)
    out << dendrogram.labels[i] << ',' << partition[i] << '\n';
}

}  // namespace forumpaths
