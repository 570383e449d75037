#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cbfs/biclustering.hpp"
#include "cbfs/dataset.hpp"

namespace cbfs {

struct ValidationEntry {
  std::string sample_name;
  std::string true_class;
  std::string predicted_class;
  double margin = 0.0;  // winning centroid minus runner-up; ~0 on a tie
  bool tie = false;
  bool correct = false;
};

struct ValidationReport {
  std::size_t err = 0;  // misclassified samples; ties count as errors
  std::vector<ValidationEntry> per_sample;
};

/// Classifies every validation sample by the centroids of the selected
/// training features: predicted cluster = argmax_r of the sample's mean over
/// the selected features of cluster r, computed on validation values. The
/// validation matrix must carry the same features in the same order as the
/// training matrix. Ties are counted as errors.
ValidationReport classify_validation(const LabeledDataset& train,
                                     const FeatureAssignment& f,
                                     const SelectionVector& x,
                                     const LabeledDataset& validation);

std::string to_csv(const ValidationReport& report);
std::string to_json(const ValidationReport& report);

struct FeatureMargin {
  std::size_t feature = 0;
  std::size_t cluster = 0;  // argmax cluster of the feature
  double margin = 0.0;      // winning centroid minus closest rival
};

struct MarginReport {
  std::vector<FeatureMargin> margins;  // ascending by margin
  std::size_t at_or_below_epsilon = 0;
  double epsilon = 0.0;
};

/// Per-feature noise margins of the sample-centroid classification: features
/// whose winning centroid barely exceeds the runner-up flip under small data
/// perturbations.
MarginReport margin_report(const DataMatrix& A, const SampleClassification& B_S,
                           double epsilon);

struct OracleResult {
  std::size_t max_count = 0;
  SelectionVector witness;  // lexicographically smallest among maxima
  bool feasible = false;    // false when no selection is consistent
};

/// Exhaustive maximum: enumerates every non-empty selection (m <= 20), keeps
/// those where every cluster retains a selected feature and the biclustering
/// is consistent, and returns the maximum cardinality. Test oracle; not for
/// production-sized data.
OracleResult brute_force_max_consistent(const DataMatrix& A,
                                        const SampleClassification& B_S,
                                        const ConsistencyMode& mode);

}  // namespace cbfs
