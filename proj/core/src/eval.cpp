#include "cbfs/eval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <variant>

#include "cbfs/errors.hpp"
#include "json.hpp"

namespace cbfs {

ValidationReport classify_validation(const LabeledDataset& train,
                                     const FeatureAssignment& f,
                                     const SelectionVector& x,
                                     const LabeledDataset& validation) {
  const DataMatrix& tm = train.matrix;
  const DataMatrix& vm = validation.matrix;
  if (tm.feature_names != vm.feature_names)
    throw ValidationError(
        "validation matrix must carry the same features in the same order as "
        "the training matrix");
  if (f.num_features() != tm.num_features() || x.size() != tm.num_features())
    throw ValidationError("assignment/selection do not match the feature space");

  // The predicted class of a new sample is the cluster whose selected-feature
  // centroid is largest on that sample.
  const Matrix c = feature_centroids(vm, f, x);

  ValidationReport report;
  report.per_sample.reserve(vm.num_samples());
  for (std::size_t j = 0; j < vm.num_samples(); ++j) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < f.k; ++r)
      if (c(j, r) > c(j, best)) best = r;
    std::size_t second = best == 0 ? 1 : 0;
    for (std::size_t r = 0; r < f.k; ++r)
      if (r != best && c(j, r) > c(j, second)) second = r;

    ValidationEntry e;
    e.sample_name = vm.sample_names[j];
    e.true_class = validation.labels.cluster_label(validation.labels.cluster_of[j]);
    e.predicted_class = train.labels.cluster_label(best);
    e.margin = c(j, best) - c(j, second);
    const double scale = std::max(std::abs(c(j, best)), std::abs(c(j, second)));
    e.tie = e.margin <= kTieRelTol * scale;
    e.correct = !e.tie && e.predicted_class == e.true_class;
    if (!e.correct) ++report.err;
    report.per_sample.push_back(std::move(e));
  }
  return report;
}

std::string to_csv(const ValidationReport& report) {
  std::ostringstream os;
  os << "sample,true_class,predicted_class,margin,tie,correct\n";
  os.precision(17);
  for (const auto& e : report.per_sample)
    os << e.sample_name << ',' << e.true_class << ',' << e.predicted_class << ','
       << e.margin << ',' << (e.tie ? 1 : 0) << ',' << (e.correct ? 1 : 0) << '\n';
  return os.str();
}

std::string to_json(const ValidationReport& report) {
  nlohmann::ordered_json j;
  j["err"] = report.err;
  j["samples"] = nlohmann::ordered_json::array();
  for (const auto& e : report.per_sample) {
    nlohmann::ordered_json s;
    s["sample"] = e.sample_name;
    s["true_class"] = e.true_class;
    s["predicted_class"] = e.predicted_class;
    s["margin"] = e.margin;
    s["tie"] = e.tie;
    s["correct"] = e.correct;
    j["samples"].push_back(std::move(s));
  }
  return j.dump(2) + "\n";
}

MarginReport margin_report(const DataMatrix& A, const SampleClassification& B_S,
                           double epsilon) {
  const Matrix c = sample_centroids(A, B_S);
  MarginReport report;
  report.epsilon = epsilon;
  report.margins.reserve(A.num_features());
  for (std::size_t i = 0; i < A.num_features(); ++i) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < B_S.k; ++r)
      if (c(i, r) > c(i, best)) best = r;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < B_S.k; ++r)
      if (r != best) margin = std::min(margin, c(i, best) - c(i, r));
    report.margins.push_back({i, best, margin});
    if (margin <= epsilon) ++report.at_or_below_epsilon;
  }
  std::stable_sort(report.margins.begin(), report.margins.end(),
                   [](const FeatureMargin& a, const FeatureMargin& b) {
                     return a.margin < b.margin;
                   });
  return report;
}

OracleResult brute_force_max_consistent(const DataMatrix& A,
                                        const SampleClassification& B_S,
                                        const ConsistencyMode& mode) {
  const std::size_t m = A.num_features();
  if (m > 20) throw ValidationError("brute force enumeration is limited to m <= 20");

  OracleResult out;
  auto cls = classify_features(sample_centroids(A, B_S));
  if (std::holds_alternative<TieReport>(cls)) return out;  // nothing is consistent
  const auto& f = std::get<FeatureAssignment>(cls);

  const double kappa = mode.kappa();
  const double rho = mode.rho();
  const std::size_t n = A.num_samples();
  const std::size_t k = B_S.k;

  std::vector<double> sums(n * k);
  std::vector<std::size_t> counts(k);
  SelectionVector x;
  x.x.resize(m);

  const std::uint32_t total = 1u << m;
  for (std::uint32_t mask = 1; mask < total; ++mask) {
    const std::size_t cardinality = static_cast<std::size_t>(std::popcount(mask));
    if (cardinality < out.max_count) continue;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
      x.x[i] = (mask >> i) & 1u;
      if (!x.x[i]) continue;
      const std::size_t r = f.cluster_of[i];
      ++counts[r];
      for (std::size_t j = 0; j < n; ++j) sums[j * k + r] += A.values(i, j);
    }
    if (std::find(counts.begin(), counts.end(), std::size_t{0}) != counts.end())
      continue;

    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) {
      const std::size_t own = B_S.cluster_of[j];
      const double lhs = sums[j * k + own] / static_cast<double>(counts[own]);
      for (std::size_t xi = 0; xi < k; ++xi) {
        if (xi == own) continue;
        const double rhs = kappa * sums[j * k + xi] / static_cast<double>(counts[xi]) + rho;
        const double tol = kTieRelTol * std::max(std::abs(lhs), std::abs(rhs));
        if (lhs - rhs <= tol) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) continue;

    if (!out.feasible || cardinality > out.max_count ||
        (cardinality == out.max_count &&
         std::lexicographical_compare(x.x.begin(), x.x.end(), out.witness.x.begin(),
                                      out.witness.x.end()))) {
      out.max_count = cardinality;
      out.witness = x;
      out.feasible = true;
    }
  }
  if (!out.feasible) out.witness.x.assign(m, 0);
  return out;
}

}  // namespace cbfs
