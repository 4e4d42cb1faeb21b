#pragma once

#include <map>
#include <vector>

#include "svcplan/bnb.hpp"
#include "svcplan/network.hpp"

namespace svcplan {

struct AcSettings {
  double tol = 1e-8;  // max bus power mismatch, p.u.
  int max_iters = 30;
};

struct AcSolution {
  bool converged = false;
  int iterations = 0;
  double final_mismatch = 0.0;
  std::vector<double> v_mag;    // by bus ordinal
  std::vector<double> v_ang;    // radians, slack at 0
  std::vector<double> p_from, q_from, p_to, q_to;  // by branch
  double total_loss = 0.0;      // p.u.
};

// Full nonlinear power flow by Newton-Raphson, flat start. Generator buses
// hold fixed voltage magnitude; the slack bus absorbs the residual. SVC
// fixings are constant susceptances added to the bus shunt.
AcSolution newton_raphson(const NetworkCase& c, const std::vector<Load>& loads,
                          const std::map<int, double>& svc_by_bus,
                          int slack_bus_id,
                          const std::vector<double>& gen_p,     // per generator
                          const std::vector<double>& v_setpoint,  // by bus ordinal
                          const AcSettings& settings = {});

struct ScenarioValidation {
  bool converged = false;
  double lfb_loss_mw = 0.0;
  double ac_loss_mw = 0.0;
  double loss_rel_err = 0.0;
  double max_v_dev = 0.0;        // max |V_lfb - V_ac|
  double max_loop_residual = 0.0;
  double cone_mismatch = 0.0;
  int iterations = 0;
};

struct ValidationReport {
  std::vector<ScenarioValidation> by_scenario;
  bool all_converged = true;
  double max_loss_rel_err = 0.0;
  double max_v_dev = 0.0;
  double max_loop_residual = 0.0;
  double max_cone_mismatch = 0.0;
};

// Re-solves every scenario as a full AC power flow with the allocation's
// SVC susceptances and dispatch, and reports the discrepancies.
ValidationReport validate(const AllocationResult& result, const MicpModel& m,
                          const NetworkCase& c, const ScenarioSet& scenarios,
                          const AcSettings& settings = {});

}  // namespace svcplan
