#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include "cbfs/biclustering.hpp"
#include "cbfs/dataset.hpp"

namespace cbfs {

// ---------------------------------------------------------------------------
// A maximization LP with >= constraints and box-bounded variables.
// ---------------------------------------------------------------------------

struct LinearConstraint {
  std::vector<double> coeffs;  // coeffs . x >= rhs
  double rhs = 0.0;
};

struct VarBounds {
  double lo = 0.0;
  double hi = 1.0;  // may be +infinity
};

struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;           // maximize objective . x
  std::vector<LinearConstraint> constraints;
  std::vector<VarBounds> var_bounds;

  /// Finite coefficients, matching sizes, finite lo <= hi.
  void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  int iterations = 0;
};

struct SimplexOptions {
  double feas_tol = 1e-9;
  double pivot_tol = 1e-10;
  /// Cap on total pivots across both phases; <= 0 means
  /// 50 * (num_vars + num_constraints).
  int max_iterations = 0;
};

/// Dense two-phase primal simplex on bounded variables. Dantzig pricing with
/// lowest-index tie-breaks, falling back to Bland's rule after a run of
/// degenerate steps, so cycling cannot occur. Deterministic for fixed input.
LpSolution solve(const LinearProgram& lp, const SimplexOptions& options = {});

/// Entry-wise threshold at 1/2; the boundary maps to 0.
SelectionVector round_selection(const std::vector<double>& x_frac);

/// Continuous relaxation of the inner selection problem at fixed proportions:
/// variables x_i in [0,1], objective max sum x_i, one constraint per
/// (sample j with own cluster r, other cluster xi):
///   sum_i [ a_ij f_{i r}/y_r - kappa a_ij f_{i xi}/y_xi ] x_i >= rho + strict_margin.
LinearProgram build_inner(const DataMatrix& A, const SampleClassification& B_S,
                          const FeatureAssignment& f, const ProportionVector& y,
                          const ConsistencyMode& mode, double strict_margin = 0.0);

/// Plain-text dump, one constraint per line, for external cross-checking.
void write_text(const LinearProgram& lp, std::ostream& out);

}  // namespace cbfs
