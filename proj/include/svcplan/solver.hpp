#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "svcplan/program.hpp"

namespace svcplan {

struct SolverSettings {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iters = 200;
  double step_fraction = 0.99;  // fraction-to-boundary
  double static_reg = 1e-8;     // KKT diagonal regularization
  int refine_steps = 2;
  bool check_duality = false;   // assert weak duality on every iterate
  std::ostream* iter_log = nullptr;  // optional CSV iteration log
};

enum class SolveStatus {
  Optimal,
  Infeasible,
  Unbounded,
  IterationLimit,
  NumericalFailure,
};

const char* to_string(SolveStatus s);

struct ResidualReport {
  double primal = 0.0;
  double dual = 0.0;
  double rel_gap = 0.0;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<double> primal;    // x, original variable order
  std::vector<double> dual_eq;   // multipliers of the equality rows
  std::vector<double> dual_cone; // multipliers of bounds/cone rows, internal order
  double objective = 0.0;
  ResidualReport residuals;
  int iterations = 0;
};

// Primal-dual interior-point method over the homogeneous self-dual
// embedding, Nesterov-Todd scaled, with a Mehrotra predictor-corrector.
// Integrality marks in the program are ignored.
ConicSolution solve(const ConicProgram& p, const SolverSettings& s = {});

// Same, with selected integer variables pinned to 0/1 (bounds collapsed).
// Positions must carry the integrality mark.
ConicSolution solve_with_fixings(const ConicProgram& p,
                                 const std::map<int, int>& fixings,
                                 const SolverSettings& s = {});

}  // namespace svcplan
