#include "cbfs/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <variant>

#include "cbfs/errors.hpp"
#include "cbfs/lp.hpp"

namespace cbfs {

void HeuristicConfig::validate() const {
  if (!(starting_range > 0.0) || starting_range > 0.5)
    throw ValidationError("starting_range must lie in (0, 0.5]");
  if (max_range < starting_range)
    throw ValidationError("max_range must be >= starting_range");
  if (!(range_growth > 1.0)) throw ValidationError("range_growth must exceed 1");
  if (restarts < 1) throw ValidationError("restarts must be positive");
  if (strict_margin < 0.0) throw ValidationError("strict_margin must be >= 0");
  if (perturb_retry_cap < 1) throw ValidationError("perturb_retry_cap must be positive");
}

std::pair<SelectionVector, ProportionVector> initialize(const FeatureAssignment& f) {
  const std::size_t m = f.num_features();
  SelectionVector x = SelectionVector::ones(m);
  ProportionVector y;
  y.y.assign(f.k, 0.0);
  for (std::size_t r : f.cluster_of) y.y[r] += 1.0;
  for (double& v : y.y) v /= static_cast<double>(m);
  return {std::move(x), std::move(y)};
}

PerturbResult perturb(const ProportionVector& y, double range, Rng& rng,
                      int retry_cap, double lo_y) {
  const std::size_t k = y.size();
  if (k < 2) throw ValidationError("perturbation needs k >= 2");
  if (!(range > 0.0)) throw ValidationError("range must be positive");

  for (int attempt = 0; attempt < retry_cap; ++attempt) {
    const std::size_t r1 = rng.uniform_index(k);
    const double lo = std::max(y.y[r1] - range, lo_y);
    const double hi = std::min(y.y[r1] + range, 1.0);
    const double drawn = rng.uniform(lo, hi);
    std::size_t r2 = rng.uniform_index(k - 1);
    if (r2 >= r1) ++r2;

    ProportionVector out = y;
    out.y[r1] = drawn;
    double rest = 0.0;
    for (std::size_t r = 0; r < k; ++r)
      if (r != r2) rest += out.y[r];
    const double rebalanced = 1.0 - rest;
    if (drawn <= lo_y || rebalanced <= lo_y || rebalanced > 1.0) continue;
    out.y[r2] = rebalanced;
    return {std::move(out), true};
  }
  return {y, false};
}

SolveResult run_single(const DataMatrix& A, const SampleClassification& B_S,
                       const FeatureAssignment& f, const HeuristicConfig& config,
                       std::uint64_t restart_seed, int restart_index,
                       const IterationLogger& logger) {
  config.validate();
  Rng rng(restart_seed);
  auto [x, y] = initialize(f);
  const ConsistencyMode& mode = config.mode;

  double range = config.starting_range;
  double best_g = std::numeric_limits<double>::infinity();
  double g = g_evaluate(A, B_S, f, x, y.y, mode);
  int iterations = 0;

  while (g > 0.0 && range <= config.max_range) {
    ++iterations;
    LinearProgram lp = build_inner(A, B_S, f, y, mode, config.strict_margin);
    LpSolution sol = solve(lp);
    const bool solved = sol.status == LpStatus::optimal;
    if (solved) {
      x = round_selection(sol.x);
      g = g_evaluate(A, B_S, f, x, y.y, mode);
    }
    if (!solved || g > 0.0) {
      range *= config.range_growth;
      if (solved && g < best_g) {
        best_g = g;
        range = config.starting_range;
      }
      y = perturb(y, range, rng, config.perturb_retry_cap).y;
      g = g_evaluate(A, B_S, f, x, y.y, mode);
    }
    if (logger)
      logger({restart_index, iterations, g, range, x.count(), to_string(sol.status)});
  }

  SolveResult result;
  result.iterations = iterations;
  result.restart_index = restart_index;
  result.selected_count = x.count();
  result.consistent = is_consistent(A, B_S, x, mode).consistent;  // may throw
  if (result.consistent) {
    // A consistent selection is certified by its own proportions, where every
    // substituted violation vanishes.
    result.y = true_proportions(f, x);
    result.g_value = g_evaluate(A, B_S, f, x, result.y.y, mode);
  } else {
    result.y = std::move(y);
    result.g_value = g;
  }
  result.x = std::move(x);
  return result;
}

namespace {

/// Ranking: consistent first, then more features, then smaller violation,
/// then earlier restart.
bool better(const SolveResult& a, const SolveResult& b) {
  if (a.consistent != b.consistent) return a.consistent;
  if (a.selected_count != b.selected_count) return a.selected_count > b.selected_count;
  if (a.g_value != b.g_value) return a.g_value < b.g_value;
  return a.restart_index < b.restart_index;
}

}  // namespace

RunResult run(const DataMatrix& A, const SampleClassification& B_S,
              const HeuristicConfig& config, const IterationLogger& logger) {
  config.validate();
  LabeledDataset view{A, B_S, DatasetRole::train};
  view.validate();

  auto cls = classify_features(sample_centroids(A, B_S));
  if (std::holds_alternative<TieReport>(cls)) {
    const auto& ties = std::get<TieReport>(cls);
    std::ostringstream os;
    os << "feature classification is ambiguous: " << ties.entries.size()
       << " feature(s) tie between clusters (first: feature "
       << ties.entries.front().index << ")";
    throw NoSolutionError(os.str());
  }
  const auto& f = std::get<FeatureAssignment>(cls);

  RunResult rr;
  const SolveResult* best = nullptr;
  for (int i = 0; i < config.restarts; ++i) {
    RestartOutcome outcome;
    outcome.index = i;
    outcome.seed = config.seed + static_cast<std::uint64_t>(i);
    try {
      outcome.result = run_single(A, B_S, f, config, outcome.seed, i, logger);
    } catch (const EmptyClusterError& e) {
      outcome.failure = e.what();
    }
    rr.restarts.push_back(std::move(outcome));
    const auto& stored = rr.restarts.back().result;
    if (stored && (!best || better(*stored, *best))) best = &*stored;
  }
  if (!best)
    throw NoSolutionError("all " + std::to_string(config.restarts) +
                          " restarts failed; no usable selection found");
  rr.best = *best;
  return rr;
}

}  // namespace cbfs
