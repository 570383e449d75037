#include "cbfs/biclustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cbfs/errors.hpp"

namespace cbfs {

namespace {

/// Strict argmax per row; rows whose top two entries are within kTieRelTol
/// (relative to their magnitudes) are collected as ties.
struct ArgmaxResult {
  std::vector<std::size_t> best;
  TieReport ties;
};

ArgmaxResult rowwise_strict_argmax(const Matrix& c) {
  if (c.cols() < 2) throw ValidationError("argmax classification needs k >= 2");
  ArgmaxResult out;
  out.best.resize(c.rows());
  for (std::size_t i = 0; i < c.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < c.cols(); ++r)
      if (c(i, r) > c(i, best)) best = r;
    // runner-up
    std::size_t second = best == 0 ? 1 : 0;
    for (std::size_t r = 0; r < c.cols(); ++r)
      if (r != best && c(i, r) > c(i, second)) second = r;
    const double gap = c(i, best) - c(i, second);
    const double scale = std::max(std::abs(c(i, best)), std::abs(c(i, second)));
    if (gap <= kTieRelTol * scale)
      out.ties.entries.push_back({i, best, second, gap});
    out.best[i] = best;
  }
  return out;
}

/// Per-sample, per-cluster sums over selected features:
/// sums(j, r) = sum_i a_ij [f_i = r] x_i.
Matrix selected_sums(const DataMatrix& A, const FeatureAssignment& f,
                     const SelectionVector& x) {
  Matrix sums(A.num_samples(), f.k, 0.0);
  for (std::size_t i = 0; i < A.num_features(); ++i) {
    if (!x.x[i]) continue;
    const std::size_t r = f.cluster_of[i];
    const double* row = A.values.row(i);
    for (std::size_t j = 0; j < A.num_samples(); ++j) sums(j, r) += row[j];
  }
  return sums;
}

std::vector<std::size_t> selected_counts(const FeatureAssignment& f,
                                         const SelectionVector& x) {
  std::vector<std::size_t> counts(f.k, 0);
  for (std::size_t i = 0; i < f.cluster_of.size(); ++i)
    if (x.x[i]) ++counts[f.cluster_of[i]];
  return counts;
}

void check_shapes(const DataMatrix& A, const FeatureAssignment& f,
                  const SelectionVector& x) {
  if (f.num_features() != A.num_features())
    throw ValidationError("feature assignment does not match the matrix");
  if (x.size() != A.num_features())
    throw ValidationError("selection length does not match the matrix");
}

}  // namespace

std::vector<std::vector<std::size_t>> FeatureAssignment::members() const {
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t i = 0; i < cluster_of.size(); ++i) out[cluster_of[i]].push_back(i);
  return out;
}

void FeatureAssignment::validate() const {
  if (k < 2) throw ValidationError("feature assignment needs k >= 2");
  for (std::size_t r : cluster_of)
    if (r >= k) throw ValidationError("feature cluster index out of range");
}

std::size_t SelectionVector::count() const {
  return static_cast<std::size_t>(std::count(x.begin(), x.end(), std::uint8_t{1}));
}

void ProportionVector::validate() const {
  double sum = 0.0;
  for (double v : y) {
    if (!(v > 0.0) || v > 1.0)
      throw ValidationError("proportion entries must lie in (0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("proportions must sum to 1");
}

ConsistencyMode ConsistencyMode::alpha(double a) {
  if (!(a > 0.0)) throw ValidationError("alpha must be positive (use plain for alpha = 0)");
  return {Kind::alpha, a};
}

ConsistencyMode ConsistencyMode::beta(double b) {
  if (!(b >= 1.0)) throw ValidationError("beta must be at least 1");
  return {Kind::beta, b};
}

std::string ConsistencyMode::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::plain: os << "plain"; break;
    case Kind::alpha: os << "alpha=" << value; break;
    case Kind::beta: os << "beta=" << value; break;
  }
  return os.str();
}

Matrix sample_centroids(const DataMatrix& A, const SampleClassification& B_S) {
  if (B_S.num_samples() != A.num_samples())
    throw ValidationError("classification does not match the matrix");
  Matrix c(A.num_features(), B_S.k, 0.0);
  std::vector<std::size_t> counts(B_S.k, 0);
  for (std::size_t j = 0; j < A.num_samples(); ++j) ++counts[B_S.cluster_of[j]];
  for (std::size_t i = 0; i < A.num_features(); ++i) {
    const double* row = A.values.row(i);
    double* crow = c.row(i);
    for (std::size_t j = 0; j < A.num_samples(); ++j) crow[B_S.cluster_of[j]] += row[j];
    for (std::size_t r = 0; r < B_S.k; ++r) crow[r] /= static_cast<double>(counts[r]);
  }
  return c;
}

std::variant<FeatureAssignment, TieReport> classify_features(const Matrix& C_S) {
  auto res = rowwise_strict_argmax(C_S);
  if (!res.ties.empty()) return res.ties;
  FeatureAssignment f;
  f.k = C_S.cols();
  f.cluster_of = std::move(res.best);
  return f;
}

Matrix feature_centroids(const DataMatrix& A, const FeatureAssignment& f,
                         const SelectionVector& x) {
  check_shapes(A, f, x);
  const auto counts = selected_counts(f, x);
  for (std::size_t r = 0; r < f.k; ++r)
    if (counts[r] == 0)
      throw EmptyClusterError(r, "feature cluster " + std::to_string(r) +
                                     " has no selected features");
  Matrix c = selected_sums(A, f, x);
  for (std::size_t j = 0; j < c.rows(); ++j)
    for (std::size_t r = 0; r < f.k; ++r) c(j, r) /= static_cast<double>(counts[r]);
  return c;
}

std::variant<SampleAssignment, TieReport> classify_samples(const Matrix& C_F) {
  auto res = rowwise_strict_argmax(C_F);
  if (!res.ties.empty()) return res.ties;
  return SampleAssignment{C_F.cols(), std::move(res.best)};
}

ConsistencyReport is_consistent(const DataMatrix& A, const SampleClassification& B_S,
                                const SelectionVector& x, const ConsistencyMode& mode) {
  ConsistencyReport report;
  auto cls = classify_features(sample_centroids(A, B_S));
  if (std::holds_alternative<TieReport>(cls)) {
    report.feature_ties = std::get<TieReport>(cls);
    report.consistent = false;
    return report;
  }
  const auto& f = std::get<FeatureAssignment>(cls);
  const Matrix c = feature_centroids(A, f, x);

  const double kappa = mode.kappa();
  const double rho = mode.rho();
  for (std::size_t j = 0; j < A.num_samples(); ++j) {
    const std::size_t own = B_S.cluster_of[j];
    const double lhs = c(j, own);
    for (std::size_t xi = 0; xi < B_S.k; ++xi) {
      if (xi == own) continue;
      const double rhs = kappa * c(j, xi) + rho;
      const double margin = lhs - rhs;
      const double tol = kTieRelTol * std::max(std::abs(lhs), std::abs(rhs));
      if (margin <= tol) report.violations.push_back({j, own, xi, margin});
    }
  }
  report.consistent = report.violations.empty();
  return report;
}

std::vector<SubstitutedMargin> substituted_margins(
    const DataMatrix& A, const SampleClassification& B_S, const FeatureAssignment& f,
    const SelectionVector& x, std::span<const double> y, const ConsistencyMode& mode) {
  check_shapes(A, f, x);
  if (B_S.num_samples() != A.num_samples())
    throw ValidationError("classification does not match the matrix");
  if (y.size() != f.k) throw ValidationError("proportion length does not match k");
  for (double v : y)
    if (!(v > 0.0)) throw ValidationError("proportions must be strictly positive");

  const Matrix sums = selected_sums(A, f, x);
  const double kappa = mode.kappa();
  const double rho = mode.rho();

  std::vector<SubstitutedMargin> out;
  out.reserve(A.num_samples() * (B_S.k - 1));
  for (std::size_t j = 0; j < A.num_samples(); ++j) {
    const std::size_t own = B_S.cluster_of[j];
    const double lhs = sums(j, own) / y[own];
    for (std::size_t xi = 0; xi < B_S.k; ++xi) {
      if (xi == own) continue;
      const double rhs = kappa * (sums(j, xi) / y[xi]) + rho;
      out.push_back({j, own, xi, lhs - rhs});
    }
  }
  return out;
}

double g_evaluate(const DataMatrix& A, const SampleClassification& B_S,
                  const FeatureAssignment& f, const SelectionVector& x,
                  std::span<const double> y, const ConsistencyMode& mode) {
  double g = 0.0;
  for (const auto& t : substituted_margins(A, B_S, f, x, y, mode))
    g += std::max(0.0, -t.margin);
  return g;
}

ProportionVector true_proportions(const FeatureAssignment& f, const SelectionVector& x) {
  if (x.size() != f.num_features())
    throw ValidationError("selection length does not match the assignment");
  const auto counts = selected_counts(f, x);
  const double total = static_cast<double>(x.count());
  ProportionVector p;
  p.y.resize(f.k);
  for (std::size_t r = 0; r < f.k; ++r) {
    if (counts[r] == 0)
      throw EmptyClusterError(r, "feature cluster " + std::to_string(r) +
                                     " has no selected features");
    p.y[r] = static_cast<double>(counts[r]) / total;
  }
  return p;
}

}  // namespace cbfs
