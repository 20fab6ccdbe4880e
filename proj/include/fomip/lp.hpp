#pragma once

#include <map>
#include <utility>
#include <vector>

#include "fomip/atom.hpp"

namespace fomip {

// Always a minimization. Range rows (both bounds finite) are handled
// natively via a bounded slack.
struct LpProblem {
  std::vector<Atom> atoms;  // column order
  std::map<Atom, double> objective;
  std::map<Atom, std::pair<double, double>> bounds;  // lb <= ub, +-inf allowed
  std::vector<LinCons> constraints;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective_value = 0.0;
  std::map<Atom, double> primal;
  std::vector<double> duals;             // one per constraint row
  std::map<Atom, double> reduced_costs;  // zero for basic columns
};

struct LpTolerances {
  double feasibility = 1e-6;
  double pivot = 1e-9;
  double reduced_cost = 1e-9;
  int bland_after_degenerate = 1000;
};

// Bounded-variable primal simplex on a dense tableau, two phases.
// Duals follow the convention reduced_cost(j) = c_j - sum_i y_i a_ij.
// Throws Error(NumericalFailure) if the pivot loop exhausts its budget.
LpSolution solve_lp(const LpProblem& p, const LpTolerances& tol = {});

// Reduced cost of a column (possibly absent from the solved problem):
// objective_coef - sum over (row, coef) of duals[row] * coef.
double reduced_cost(const LpSolution& sol, double objective_coef,
                    const std::vector<std::pair<int, double>>& column);

}  // namespace fomip
