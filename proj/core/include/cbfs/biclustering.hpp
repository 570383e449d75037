#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cbfs/dataset.hpp"
#include "cbfs/matrix.hpp"

namespace cbfs {

/// Relative tolerance below which the top two values of an argmax are
/// considered tied. Ties make a classification ambiguous and any biclustering
/// built on them is treated as inconsistent.
inline constexpr double kTieRelTol = 1e-12;

/// Partition of the features into k clusters; every feature belongs to
/// exactly one cluster. Empty feature clusters are representable; selected
/// emptiness is rejected where centroids are computed.
struct FeatureAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> cluster_of;  // one entry per feature

  std::size_t num_features() const noexcept { return cluster_of.size(); }
  /// Features per cluster, ascending.
  std::vector<std::vector<std::size_t>> members() const;
  void validate() const;
};

/// Binary feature selection. The fractional relaxation is a plain
/// std::vector<double> in [0,1]^m; this type is the rounded form.
struct SelectionVector {
  std::vector<std::uint8_t> x;

  static SelectionVector ones(std::size_t m) { return {std::vector<std::uint8_t>(m, 1)}; }
  std::size_t size() const noexcept { return x.size(); }
  std::size_t count() const;
  bool operator==(const SelectionVector&) const = default;
};

/// Feature-cluster cardinality proportions: every entry in (0,1], summing to
/// 1 within 1e-9.
struct ProportionVector {
  std::vector<double> y;

  std::size_t size() const noexcept { return y.size(); }
  void validate() const;
};

/// Plain, additive-margin (alpha) or multiplicative-margin (beta)
/// consistency. A single scalar is used for every sample.
struct ConsistencyMode {
  enum class Kind { plain, alpha, beta };
  Kind kind = Kind::plain;
  double value = 0.0;

  static ConsistencyMode plain() { return {Kind::plain, 0.0}; }
  static ConsistencyMode alpha(double a);
  static ConsistencyMode beta(double b);

  /// Every mode's requirement is lhs > kappa * rhs_term + rho.
  double kappa() const noexcept { return kind == Kind::beta ? value : 1.0; }
  double rho() const noexcept { return kind == Kind::alpha ? value : 0.0; }
  std::string describe() const;
};

struct TieEntry {
  std::size_t index;    // feature or sample index
  std::size_t best;     // winning cluster
  std::size_t second;   // runner-up within tolerance
  double gap;
};

struct TieReport {
  std::vector<TieEntry> entries;
  bool empty() const noexcept { return entries.empty(); }
};

/// Sample classification induced by feature centroids. Unlike
/// SampleClassification this carries no non-empty-cluster guarantee: an
/// induced partition may well leave clusters unused.
struct SampleAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> cluster_of;
};

// ---------------------------------------------------------------------------
// Centroids and the two classification directions.
// ---------------------------------------------------------------------------

/// m x k matrix whose (i, r) entry is the mean of row i over the samples of
/// cluster r.
Matrix sample_centroids(const DataMatrix& A, const SampleClassification& B_S);

/// Assigns each feature to the cluster where it is most expressed (strict
/// row-wise argmax of the sample-centroid matrix). Rows whose top two values
/// are within kTieRelTol are reported instead.
std::variant<FeatureAssignment, TieReport> classify_features(const Matrix& C_S);

/// n x k matrix whose (j, r) entry is the mean of column j over the
/// *selected* features of cluster r. Throws EmptyClusterError if a cluster
/// has no selected feature.
Matrix feature_centroids(const DataMatrix& A, const FeatureAssignment& f,
                         const SelectionVector& x);

/// Strict row-wise argmax of a feature-centroid matrix.
std::variant<SampleAssignment, TieReport> classify_samples(const Matrix& C_F);

// ---------------------------------------------------------------------------
// Consistency.
// ---------------------------------------------------------------------------

struct Violation {
  std::size_t sample;
  std::size_t own_cluster;    // cluster the sample is labeled with
  std::size_t other_cluster;  // cluster whose centroid ties or wins
  double margin;              // lhs - kappa*rhs - rho; <= 0 is a failure
};

struct ConsistencyReport {
  bool consistent = false;
  std::vector<Violation> violations;
  TieReport feature_ties;  // non-empty iff the feature classification tied
};

/// True-denominator consistency check: derives the feature assignment from
/// the sample centroids, then requires every sample's own feature centroid to
/// strictly dominate all others by the mode's margin. Classification ties
/// count as inconsistent.
ConsistencyReport is_consistent(const DataMatrix& A, const SampleClassification& B_S,
                                const SelectionVector& x, const ConsistencyMode& mode);

// ---------------------------------------------------------------------------
// Substituted constraints (denominators replaced by proportions y).
// ---------------------------------------------------------------------------

struct SubstitutedMargin {
  std::size_t sample;
  std::size_t own_cluster;
  std::size_t other_cluster;
  double margin;  // lhs/y_own - kappa*rhs/y_other - rho
};

/// Margins of every substituted constraint at the given positive proportions.
/// `y` need not be normalized; scaling all entries by a positive factor
/// preserves the satisfaction set in plain and beta modes.
std::vector<SubstitutedMargin> substituted_margins(
    const DataMatrix& A, const SampleClassification& B_S, const FeatureAssignment& f,
    const SelectionVector& x, std::span<const double> y, const ConsistencyMode& mode);

/// Sum of positive parts of the substituted-constraint violations. Zero iff
/// every substituted constraint holds non-strictly.
double g_evaluate(const DataMatrix& A, const SampleClassification& B_S,
                  const FeatureAssignment& f, const SelectionVector& x,
                  std::span<const double> y, const ConsistencyMode& mode);

/// Proportions realized by a selection: y_r = |selected in cluster r| / |selected|.
/// Throws EmptyClusterError if a cluster has no selected feature.
ProportionVector true_proportions(const FeatureAssignment& f, const SelectionVector& x);

}  // namespace cbfs
