#pragma once

#include <iosfwd>
#include <vector>

#include "svcplan/micp.hpp"
#include "svcplan/solver.hpp"

namespace svcplan {

struct BnbSettings {
  double abs_gap = 1e-6;
  double rel_gap = 1e-4;
  int max_nodes = 100000;
  double integrality_tol = 1e-6;
  SolverSettings solver;
  std::ostream* node_log = nullptr;  // optional CSV node log
};

struct ScenarioOutcome {
  double loss_mw = 0.0;
  double dev_w = 0.0;  // sum |V^2 - 1|
  double dev_v = 0.0;  // sum |V - 1|
  std::vector<double> volt;   // by bus ordinal
  std::vector<double> svc_b;  // by candidate ordinal
};

struct AllocationResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<int> chosen_buses;  // ids, ascending
  std::vector<ScenarioOutcome> by_scenario;
  double objective = 0.0;
  double loss_term = 0.0;     // weighted, p.u.
  double dev_term = 0.0;      // weighted, p.u.
  double penalty_term = 0.0;  // weighted, p.u.
  double weighted_loss_mw = 0.0;
  double weighted_dev_w = 0.0;
  double weighted_dev_v = 0.0;
  double bound_gap = 0.0;  // incumbent - proven lower bound
  double max_cone_mismatch = 0.0;
  int nodes = 0;
  double wall_seconds = 0.0;
  std::vector<double> primal;  // incumbent, full variable vector
};

// Branch-and-bound over the install flags, best-bound node order,
// most-fractional branching with lowest-bus-id tie break.
AllocationResult solve_misocp(const MicpModel& m, const NetworkCase& c,
                              const ScenarioSet& scenarios,
                              const WeightScheme& w,
                              const BnbSettings& settings = {});

// Continuous solve with every install flag pinned (e.g. the no-SVC baseline).
AllocationResult solve_fixed_allocation(const MicpModel& m,
                                        const NetworkCase& c,
                                        const ScenarioSet& scenarios,
                                        const WeightScheme& w,
                                        const std::vector<int>& chosen_bus_ids,
                                        const SolverSettings& settings = {});

// Exposed for tests: index of the flag to branch on (most fractional,
// lowest bus id on ties). Throws if every flag is within tol of integral.
int select_branch_variable(const std::vector<double>& primal,
                           const MicpModel& m, double integrality_tol);

// Rounding heuristic: the n_v largest fractional flags (above tol) become 1.
// Returns chosen bus ids, ascending.
std::vector<int> round_candidate(const std::vector<double>& primal,
                                 const MicpModel& m, int n_v,
                                 double integrality_tol);

}  // namespace svcplan
