#include "cbfs/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "cbfs/errors.hpp"

namespace cbfs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense tableau simplex over bounded variables.
///
/// Columns are [structural | surplus | artificial]; every constraint is
/// `coeffs . x >= rhs`, rewritten as an equality with a surplus variable.
/// Nonbasic variables rest at one of their bounds. Phase 1 drives artificial
/// variables (added only for rows infeasible at the all-lower-bounds point)
/// to zero; phase 2 maximizes the real objective.
class DenseSimplex {
 public:
  DenseSimplex(const LinearProgram& lp, const SimplexOptions& opt)
      : opt_(opt), n_struct_(lp.num_vars), n_rows_(lp.constraints.size()) {
    if (opt_.max_iterations <= 0)
      opt_.max_iterations = 50 * static_cast<int>(lp.num_vars + lp.constraints.size());

    rhs_scale_ = 1.0;
    for (const auto& c : lp.constraints) rhs_scale_ = std::max(rhs_scale_, std::abs(c.rhs));

    // Decide per-row whether the all-lower-bounds point is feasible.
    std::vector<double> residual(n_rows_);  // rhs - coeffs . lo
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < n_rows_; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n_struct_; ++j)
        dot += lp.constraints[i].coeffs[j] * lp.var_bounds[j].lo;
      residual[i] = lp.constraints[i].rhs - dot;
      if (residual[i] > 0.0) ++n_art;
    }

    n_cols_ = n_struct_ + n_rows_ + n_art;
    tableau_.assign(n_rows_ * n_cols_, 0.0);
    bounds_.resize(n_cols_);
    value_.resize(n_cols_);
    at_upper_.assign(n_cols_, 0);
    is_artificial_.assign(n_cols_, 0);
    basis_.resize(n_rows_);

    for (std::size_t j = 0; j < n_struct_; ++j) {
      bounds_[j] = lp.var_bounds[j];
      value_[j] = bounds_[j].lo;
    }
    for (std::size_t i = 0; i < n_rows_; ++i) {
      bounds_[n_struct_ + i] = {0.0, kInf};
      value_[n_struct_ + i] = 0.0;
    }

    std::size_t next_art = n_struct_ + n_rows_;
    for (std::size_t i = 0; i < n_rows_; ++i) {
      double* row = row_ptr(i);
      const std::size_t s = n_struct_ + i;
      if (residual[i] <= 0.0) {
        // Feasible row: store negated so the basic surplus has coefficient +1.
        for (std::size_t j = 0; j < n_struct_; ++j) row[j] = -lp.constraints[i].coeffs[j];
        row[s] = 1.0;
        basis_[i] = s;
        value_[s] = -residual[i];
      } else {
        for (std::size_t j = 0; j < n_struct_; ++j) row[j] = lp.constraints[i].coeffs[j];
        row[s] = -1.0;
        row[next_art] = 1.0;
        bounds_[next_art] = {0.0, kInf};
        is_artificial_[next_art] = 1;
        basis_[i] = next_art;
        value_[next_art] = residual[i];
        ++next_art;
      }
    }

    objective_.assign(n_cols_, 0.0);
    real_objective_ = objective_;
    for (std::size_t j = 0; j < n_struct_; ++j) real_objective_[j] = lp.objective[j];
  }

  LpSolution run() {
    LpSolution sol;

    // Phase 1: maximize minus the sum of artificials.
    bool need_phase1 = false;
    for (std::size_t j = n_struct_ + n_rows_; j < n_cols_; ++j) {
      objective_[j] = -1.0;
      need_phase1 = true;
    }
    if (need_phase1) {
      switch (run_phase()) {
        case PhaseResult::optimal: break;
        case PhaseResult::iteration_limit:
          sol.status = LpStatus::iteration_limit;
          sol.iterations = iterations_;
          return sol;
        case PhaseResult::unbounded:
          throw Error("simplex: phase 1 reported an unbounded ray");
      }
      double infeasibility = 0.0;
      for (std::size_t j = 0; j < n_cols_; ++j)
        if (is_artificial_[j]) infeasibility += value_[j];
      if (infeasibility > opt_.feas_tol * (1.0 + rhs_scale_)) {
        sol.status = LpStatus::infeasible;
        sol.iterations = iterations_;
        return sol;
      }
      purge_artificials();
    }

    objective_ = real_objective_;
    switch (run_phase()) {
      case PhaseResult::optimal: break;
      case PhaseResult::iteration_limit:
        sol.status = LpStatus::iteration_limit;
        sol.iterations = iterations_;
        return sol;
      case PhaseResult::unbounded:
        sol.status = LpStatus::unbounded;
        sol.iterations = iterations_;
        return sol;
    }

    sol.status = LpStatus::optimal;
    sol.iterations = iterations_;
    sol.x.resize(n_struct_);
    double obj = 0.0;
    for (std::size_t j = 0; j < n_struct_; ++j) {
      double v = std::max(value_[j], bounds_[j].lo);
      if (std::isfinite(bounds_[j].hi)) v = std::min(v, bounds_[j].hi);
      sol.x[j] = v;
      obj += real_objective_[j] * v;
    }
    sol.objective_value = obj;
    return sol;
  }

 private:
  enum class PhaseResult { optimal, unbounded, iteration_limit };

  double* row_ptr(std::size_t i) { return tableau_.data() + i * n_cols_; }

  bool is_basic(std::size_t j) const {
    for (std::size_t i = 0; i < n_rows_; ++i)
      if (basis_[i] == j) return true;
    return false;
  }

  /// Reduced cost of column j: d_j = c_j - sum_i c_{basis(i)} T_{ij}.
  double reduced_cost(std::size_t j, const std::vector<double>& basic_costs) const {
    double d = objective_[j];
    const double* col = tableau_.data() + j;
    for (std::size_t i = 0; i < n_rows_; ++i)
      if (basic_costs[i] != 0.0) d -= basic_costs[i] * col[i * n_cols_];
    return d;
  }

  PhaseResult run_phase() {
    int degenerate_run = 0;
    bool bland = false;
    std::vector<double> basic_costs(n_rows_);
    std::vector<std::uint8_t> in_basis(n_cols_);

    while (true) {
      if (iterations_ >= opt_.max_iterations) return PhaseResult::iteration_limit;

      for (std::size_t i = 0; i < n_rows_; ++i) basic_costs[i] = objective_[basis_[i]];
      std::fill(in_basis.begin(), in_basis.end(), std::uint8_t{0});
      for (std::size_t i = 0; i < n_rows_; ++i) in_basis[basis_[i]] = 1;

      // Entering variable. Direction +1 grows a variable resting at its lower
      // bound, -1 shrinks one resting at its upper bound.
      std::size_t enter = n_cols_;
      int dir = 0;
      double best_score = opt_.feas_tol;
      for (std::size_t j = 0; j < n_cols_; ++j) {
        // Artificials never re-enter once they have left the basis.
        if (in_basis[j] || is_artificial_[j]) continue;
        if (bounds_[j].hi - bounds_[j].lo <= 0.0) continue;  // fixed
        const double d = reduced_cost(j, basic_costs);
        int candidate_dir = 0;
        if (!at_upper_[j] && d > opt_.feas_tol) candidate_dir = 1;
        else if (at_upper_[j] && d < -opt_.feas_tol) candidate_dir = -1;
        if (candidate_dir == 0) continue;
        if (bland) {
          enter = j;
          dir = candidate_dir;
          break;
        }
        if (std::abs(d) > best_score) {
          best_score = std::abs(d);
          enter = j;
          dir = candidate_dir;
        }
      }
      if (enter == n_cols_) return PhaseResult::optimal;

      // Ratio test: how far can the entering variable move?
      const double own_range = bounds_[enter].hi - bounds_[enter].lo;
      double step = own_range;  // may be +inf
      std::ptrdiff_t block_row = -1;
      for (std::size_t i = 0; i < n_rows_; ++i) {
        const double alpha = dir * row_ptr(i)[enter];
        const std::size_t b = basis_[i];
        double limit;
        if (alpha > opt_.pivot_tol) {
          limit = (value_[b] - bounds_[b].lo) / alpha;
        } else if (alpha < -opt_.pivot_tol) {
          if (!std::isfinite(bounds_[b].hi)) continue;
          limit = (bounds_[b].hi - value_[b]) / (-alpha);
        } else {
          continue;
        }
        if (limit < 0.0) limit = 0.0;
        if (!std::isfinite(step) || limit < step - 1e-12 * (1.0 + std::abs(step))) {
          step = limit;
          block_row = static_cast<std::ptrdiff_t>(i);
        } else if (limit <= step + 1e-12 * (1.0 + std::abs(step)) && block_row >= 0 &&
                   basis_[i] < basis_[static_cast<std::size_t>(block_row)]) {
          block_row = static_cast<std::ptrdiff_t>(i);  // Bland-friendly tie-break
        }
      }

      if (!std::isfinite(step) && block_row < 0) return PhaseResult::unbounded;

      ++iterations_;
      if (step <= 1e-11) {
        if (++degenerate_run > 100) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      if (block_row < 0) {
        // The entering variable hits its own opposite bound: a bound flip.
        const double delta = dir * step;
        for (std::size_t i = 0; i < n_rows_; ++i)
          value_[basis_[i]] -= row_ptr(i)[enter] * delta;
        at_upper_[enter] = !at_upper_[enter];
        value_[enter] = at_upper_[enter] ? bounds_[enter].hi : bounds_[enter].lo;
        continue;
      }

      // Pivot: entering replaces the blocking basic variable.
      const auto brow = static_cast<std::size_t>(block_row);
      const double delta = dir * step;
      const double alpha_block = dir * row_ptr(brow)[enter];
      for (std::size_t i = 0; i < n_rows_; ++i)
        value_[basis_[i]] -= row_ptr(i)[enter] * delta;
      value_[enter] += delta;

      const std::size_t leave = basis_[brow];
      const bool leave_at_lower = alpha_block > 0.0;
      value_[leave] = leave_at_lower ? bounds_[leave].lo : bounds_[leave].hi;
      at_upper_[leave] = !leave_at_lower;

      pivot(brow, enter);
      basis_[brow] = enter;
    }
  }

  void pivot(std::size_t prow, std::size_t pcol) {
    double* prow_ptr = row_ptr(prow);
    const double p = prow_ptr[pcol];
    for (std::size_t j = 0; j < n_cols_; ++j) prow_ptr[j] /= p;
    prow_ptr[pcol] = 1.0;
    for (std::size_t i = 0; i < n_rows_; ++i) {
      if (i == prow) continue;
      double* row = row_ptr(i);
      const double factor = row[pcol];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < n_cols_; ++j) row[j] -= factor * prow_ptr[j];
      row[pcol] = 0.0;
    }
  }

  /// After phase 1: pivot leftover artificials out of the basis (they sit at
  /// zero) and drop rows that turn out redundant. Artificial columns are then
  /// excluded from pricing.
  void purge_artificials() {
    for (std::size_t i = 0; i < n_rows_;) {
      if (!is_artificial_[basis_[i]]) {
        ++i;
        continue;
      }
      std::size_t pcol = n_cols_;
      for (std::size_t j = 0; j < n_cols_ && pcol == n_cols_; ++j)
        if (!is_artificial_[j] && std::abs(row_ptr(i)[j]) > opt_.pivot_tol && !is_basic(j))
          pcol = j;
      if (pcol != n_cols_) {
        // Degenerate pivot: the artificial leaves at value zero, the entering
        // column becomes basic at its current (bound) value.
        const std::size_t art = basis_[i];
        value_[art] = 0.0;
        at_upper_[art] = 0;
        pivot(i, pcol);
        basis_[i] = pcol;
        ++i;
      } else {
        erase_row(i);
      }
    }
  }

  void erase_row(std::size_t i) {
    const std::size_t last = n_rows_ - 1;
    if (i != last) {
      std::copy(row_ptr(last), row_ptr(last) + n_cols_, row_ptr(i));
      basis_[i] = basis_[last];
    }
    basis_.pop_back();
    tableau_.resize(last * n_cols_);
    n_rows_ = last;
  }

  SimplexOptions opt_;
  std::size_t n_struct_;
  std::size_t n_rows_;
  std::size_t n_cols_ = 0;
  double rhs_scale_ = 1.0;
  std::vector<double> tableau_;
  std::vector<double> objective_;
  std::vector<double> real_objective_;
  std::vector<VarBounds> bounds_;
  std::vector<double> value_;
  std::vector<std::uint8_t> at_upper_;
  std::vector<std::uint8_t> is_artificial_;
  std::vector<std::size_t> basis_;
  int iterations_ = 0;
};

}  // namespace

void LinearProgram::validate() const {
  if (num_vars == 0) throw ValidationError("LP needs at least one variable");
  if (objective.size() != num_vars)
    throw ValidationError("objective length does not match num_vars");
  if (var_bounds.size() != num_vars)
    throw ValidationError("bounds length does not match num_vars");
  for (double c : objective)
    if (!std::isfinite(c)) throw ValidationError("non-finite objective coefficient");
  for (const auto& b : var_bounds) {
    if (!std::isfinite(b.lo)) throw ValidationError("lower bounds must be finite");
    if (std::isnan(b.hi) || b.hi < b.lo) throw ValidationError("bounds must satisfy lo <= hi");
  }
  for (const auto& c : constraints) {
    if (c.coeffs.size() != num_vars)
      throw ValidationError("constraint length does not match num_vars");
    for (double v : c.coeffs)
      if (!std::isfinite(v)) throw ValidationError("non-finite constraint coefficient");
    if (!std::isfinite(c.rhs)) throw ValidationError("non-finite constraint rhs");
  }
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

LpSolution solve(const LinearProgram& lp, const SimplexOptions& options) {
  lp.validate();
  DenseSimplex simplex(lp, options);
  return simplex.run();
}

SelectionVector round_selection(const std::vector<double>& x_frac) {
  SelectionVector s;
  s.x.resize(x_frac.size());
  for (std::size_t i = 0; i < x_frac.size(); ++i) s.x[i] = x_frac[i] > 0.5 ? 1 : 0;
  return s;
}

LinearProgram build_inner(const DataMatrix& A, const SampleClassification& B_S,
                          const FeatureAssignment& f, const ProportionVector& y,
                          const ConsistencyMode& mode, double strict_margin) {
  if (f.num_features() != A.num_features())
    throw ValidationError("feature assignment does not match the matrix");
  if (y.size() != f.k) throw ValidationError("proportion length does not match k");
  y.validate();

  const std::size_t m = A.num_features();
  const double kappa = mode.kappa();
  const double rho = mode.rho();

  LinearProgram lp;
  lp.num_vars = m;
  lp.objective.assign(m, 1.0);
  lp.var_bounds.assign(m, VarBounds{0.0, 1.0});
  lp.constraints.reserve(A.num_samples() * (B_S.k - 1));

  for (std::size_t j = 0; j < A.num_samples(); ++j) {
    const std::size_t own = B_S.cluster_of[j];
    for (std::size_t xi = 0; xi < B_S.k; ++xi) {
      if (xi == own) continue;
      LinearConstraint c;
      c.coeffs.assign(m, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t r = f.cluster_of[i];
        if (r == own)
          c.coeffs[i] = A.values(i, j) / y.y[own];
        else if (r == xi)
          c.coeffs[i] = -kappa * A.values(i, j) / y.y[xi];
      }
      c.rhs = rho + strict_margin;
      lp.constraints.push_back(std::move(c));
    }
  }
  return lp;
}

void write_text(const LinearProgram& lp, std::ostream& out) {
  char buf[64];
  out << "maximize";
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    std::snprintf(buf, sizeof buf, " %+.12e", lp.objective[j]);
    out << buf << "*x" << j;
  }
  out << '\n';
  for (const auto& c : lp.constraints) {
    out << "subject_to";
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
      std::snprintf(buf, sizeof buf, " %+.12e", c.coeffs[j]);
      out << buf << "*x" << j;
    }
    std::snprintf(buf, sizeof buf, " >= %+.12e", c.rhs);
    out << buf << '\n';
  }
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    std::snprintf(buf, sizeof buf, "bounds %.12e <= x%zu <= %.12e", lp.var_bounds[j].lo,
                  j, lp.var_bounds[j].hi);
    out << buf << '\n';
  }
}

}  // namespace cbfs
