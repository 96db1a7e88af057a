#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forumpaths/features.hpp"

namespace forumpaths {

enum class FeatureColumn { size, length, base, offset, spread };

std::string_view to_string(FeatureColumn column);
FeatureColumn parse_feature_column(std::string_view name);

/// size, length, base, offset, spread
std::vector<FeatureColumn> default_cluster_columns();
/// size, length, base, spread (offset dropped)
std::vector<FeatureColumn> baseline_only_columns();

enum class NormalizationMode { by_variance, by_stddev };

std::string_view to_string(NormalizationMode mode);
NormalizationMode parse_normalization_mode(std::string_view name);

struct FeatureMatrix {
  std::vector<std::string> rows;
  std::vector<FeatureColumn> columns;
  std::vector<double> values;  // row-major
  NormalizationMode mode = NormalizationMode::by_stddev;

  std::size_t row_count() const noexcept { return rows.size(); }
  std::size_t column_count() const noexcept { return columns.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * columns.size() + c]; }
};

/// Divides every column by its dispersion (sample variance or sample
/// standard deviation, n - 1 denominator) without centering. The offset
/// column is divided by the dispersion of the base column. Throws
/// std::invalid_argument for fewer than two rows and DataError for a
/// zero-dispersion or missing value.
FeatureMatrix normalize_feature_matrix(std::span<const NamedFeatures> raw,
                                       std::span<const FeatureColumn> columns,
                                       NormalizationMode mode);

enum class Linkage { ward, single, average };

std::string_view to_string(Linkage linkage);
Linkage parse_linkage(std::string_view name);

/// Merge step. Clusters are numbered like SciPy: leaves 0..n-1, the
/// cluster formed by merge i gets id n + i. first < second.
struct Merge {
  std::size_t first = 0;
  std::size_t second = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::vector<std::string> labels;
  std::vector<Merge> merges;  // n - 1 entries

  std::size_t leaf_count() const noexcept { return labels.size(); }
};

/// Agglomerative clustering under Euclidean distance using the
/// Lance-Williams update. For Ward linkage the merge height is
/// sqrt(2 * increase in within-cluster sum of squares), which equals the
/// Euclidean distance for two singletons. Equal linkage distances are
/// resolved toward the pair with the smallest (lower row, higher row)
/// leader indices, where a cluster's leader is its smallest row index.
Dendrogram hierarchical_clustering(const FeatureMatrix& matrix, Linkage linkage = Linkage::ward);

inline Dendrogram ward_clustering(const FeatureMatrix& matrix) {
  return hierarchical_clustering(matrix, Linkage::ward);
}

/// Cluster id per leaf after undoing the top k - 1 merges. Ids follow the
/// order of each group's smallest leaf index.
std::vector<std::size_t> cut_dendrogram(const Dendrogram& dendrogram, std::size_t k);

/// {"labels": [...], "merges": [{"first","second","height","size"}...]}
std::string dendrogram_to_json(const Dendrogram& dendrogram);
/// Newick with branch lengths equal to height differences.
std::string dendrogram_to_newick(const Dendrogram& dendrogram);
/// forum,cluster_id
void write_partition_csv(std::ostream& out, const Dendrogram& dendrogram,
                         std::span<const std::size_t> partition);

}  // namespace forumpaths
