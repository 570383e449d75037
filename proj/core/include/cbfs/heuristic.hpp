#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbfs/biclustering.hpp"
#include "cbfs/dataset.hpp"
#include "cbfs/rng.hpp"

namespace cbfs {

/// Strictly positive floor for proportion entries, so 1/y_r stays finite.
inline constexpr double kProportionFloor = 1e-6;

struct HeuristicConfig {
  double starting_range = 0.05;  // in (0, 0.5]
  double max_range = 0.5;        // >= starting_range
  double range_growth = 1.5;     // > 1
  int restarts = 10;
  std::uint64_t seed = 1;
  ConsistencyMode mode = ConsistencyMode::plain();
  double strict_margin = 0.0;
  int perturb_retry_cap = 10;

  void validate() const;
};

struct SolveResult {
  SelectionVector x;
  ProportionVector y;
  double g_value = 0.0;
  std::size_t selected_count = 0;
  bool consistent = false;  // true-denominator verdict
  int iterations = 0;       // inner LP solves in the winning restart
  int restart_index = 0;
};

/// One log record per heuristic iteration, for machine-parseable progress.
struct IterationLog {
  int restart = 0;
  int iteration = 0;
  double g = 0.0;
  double range = 0.0;
  std::size_t selected = 0;
  std::string lp_status;
};

using IterationLogger = std::function<void(const IterationLog&)>;

struct RestartOutcome {
  int index = 0;
  std::uint64_t seed = 0;
  std::optional<SolveResult> result;  // empty when the restart failed
  std::string failure;                // reason, when failed
};

struct RunResult {
  SolveResult best;
  std::vector<RestartOutcome> restarts;
};

/// Starting point of the search: everything selected, proportions equal to
/// the distribution of all m features over the clusters.
std::pair<SelectionVector, ProportionVector> initialize(const FeatureAssignment& f);

struct PerturbResult {
  ProportionVector y;
  bool changed = false;  // false when every retry was rejected (no-op)
};

/// Moves one proportion uniformly within +-range (clipped to (lo_y, 1]) and
/// rebalances a second one so the sum stays 1. Draws violating the floor are
/// redrawn up to retry_cap times; exhaustion returns y unchanged.
PerturbResult perturb(const ProportionVector& y, double range, Rng& rng,
                      int retry_cap, double lo_y = kProportionFloor);

/// One restart of the search loop: solve the inner LP at the current
/// proportions, round, evaluate the violation function, widen the
/// perturbation range (resetting it when the violation improves), perturb,
/// and stop when the violation reaches zero or the range is exhausted. The
/// returned selection additionally carries the true-denominator consistency
/// verdict. Throws EmptyClusterError when the final selection empties a
/// cluster; callers treat that as a failed restart.
SolveResult run_single(const DataMatrix& A, const SampleClassification& B_S,
                       const FeatureAssignment& f, const HeuristicConfig& config,
                       std::uint64_t restart_seed, int restart_index = 0,
                       const IterationLogger& logger = {});

/// Full search: classifies the features once, runs `restarts` restarts with
/// seeds seed, seed+1, ..., and returns the best result ranked by
/// (consistent desc, selected_count desc, g asc, restart_index asc).
/// Throws NoSolutionError when every restart fails.
RunResult run(const DataMatrix& A, const SampleClassification& B_S,
              const HeuristicConfig& config, const IterationLogger& logger = {});

}  // namespace cbfs
