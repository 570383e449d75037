#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cbfs/matrix.hpp"

namespace cbfs {

/// An m x n data matrix: features as rows, samples as columns, both named.
struct DataMatrix {
  Matrix values;
  std::vector<std::string> feature_names;
  std::vector<std::string> sample_names;

  std::size_t num_features() const noexcept { return values.rows(); }
  std::size_t num_samples() const noexcept { return values.cols(); }

  /// Enforces the construction invariants: at least one row and column,
  /// finite values, unique names, name counts matching the dimensions.
  void validate() const;
};

/// Partition of the sample indices {0..n-1} into k non-empty clusters.
/// Cluster indices are 0-based; `class_names`, when non-empty, gives the
/// human name of each cluster.
struct SampleClassification {
  std::size_t k = 0;
  std::vector<std::size_t> cluster_of;       // one entry per sample
  std::vector<std::string> class_names;      // size k, may be empty

  std::size_t num_samples() const noexcept { return cluster_of.size(); }

  /// Sample indices grouped by cluster, in ascending order.
  std::vector<std::vector<std::size_t>> members() const;

  std::string cluster_label(std::size_t r) const;

  /// Checks k >= 2, full disjoint cover and no empty cluster.
  void validate() const;
};

enum class DatasetRole { train, validation };

struct LabeledDataset {
  DataMatrix matrix;
  SampleClassification labels;
  DatasetRole role = DatasetRole::train;

  /// Matrix and labels must agree on the sample set, and k <= min(m, n).
  void validate() const;
};

// ---------------------------------------------------------------------------
// File I/O.
//
// Matrix CSV: first line `feature,<sample_1>,...,<sample_n>`; each following
// line `name,v1,...,vn`. Decimal point, no thousands separators, UTF-8.
// Labels CSV: lines `sample_name,class_name`, no header.
// ---------------------------------------------------------------------------

DataMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const DataMatrix& m, const std::filesystem::path& path);

/// Class names are mapped to cluster indices in first-appearance order.
SampleClassification load_labels(const std::filesystem::path& path,
                                 const DataMatrix& matrix);
void save_labels(const SampleClassification& labels, const DataMatrix& matrix,
                 const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic instances.
// ---------------------------------------------------------------------------

struct PlantedParams {
  std::size_t m = 8;               // total features
  std::size_t n = 6;               // samples
  std::size_t k = 2;               // clusters
  double signal = 1.0;             // block height of planted features
  std::size_t noise_features = 0;  // trailing rows that break consistency
  std::uint64_t seed = 0;
};

struct GeneratedDataset {
  LabeledDataset data;
  /// Planted cluster of every feature (noise rows carry the cluster whose
  /// centroid they dominate).
  std::vector<std::size_t> planted_cluster;
  /// Selection guaranteed to admit a consistent biclustering: all planted
  /// rows, none of the noise rows.
  std::vector<std::uint8_t> consistent_selection;
};

/// Builds a block-structured instance. The first m - noise_features rows form
/// a consistent biclustering by construction: row i of planted cluster r is
/// `signal` plus jitter in [-signal/10, signal/10] on the samples of S_r and
/// plain jitter elsewhere. Noise rows are classified into cluster 0 by a
/// strict margin but carry values large enough that any selection including
/// them misclassifies every sample outside S_0. Pure function of its
/// arguments, including the seed.
GeneratedDataset generate_planted(const PlantedParams& p);

}  // namespace cbfs
