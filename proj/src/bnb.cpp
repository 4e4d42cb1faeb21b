#include "svcplan/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <queue>
#include <set>

#include "svcplan/errors.hpp"

namespace svcplan {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Solver outcomes a node bound may rest on: converged, or stopped with a
// point whose own residuals are well inside the search tolerances.
bool usable(const ConicSolution& sol) {
  if (sol.status == SolveStatus::Optimal) return true;
  if (sol.status == SolveStatus::Infeasible ||
      sol.status == SolveStatus::Unbounded)
    return false;
  return sol.residuals.primal <= 1e-6 && sol.residuals.dual <= 1e-6 &&
         sol.residuals.rel_gap <= 1e-6;
}

ConicSolution solve_node(const ConicProgram& prog,
                         const std::map<int, int>& fixings,
                         const SolverSettings& st, int node_id) {
  ConicSolution sol = solve_with_fixings(prog, fixings, st);
  if (sol.status != SolveStatus::Optimal &&
      sol.status != SolveStatus::Infeasible &&
      sol.status != SolveStatus::Unbounded && !usable(sol)) {
    SolverSettings retry = st;
    retry.static_reg = st.static_reg * 100.0;
    retry.step_fraction = 0.95;
    retry.max_iters = st.max_iters + 150;
    sol = solve_with_fixings(prog, fixings, retry);
  }
  if (sol.status == SolveStatus::NumericalFailure)
    throw SolveError("node " + std::to_string(node_id) +
                     ": solver numerical failure");
  return sol;
}

AllocationResult build_result(const MicpModel& m, const NetworkCase& c,
                              const ScenarioSet& scenarios,
                              const WeightScheme& w,
                              const std::vector<double>& primal,
                              double objective, SolveStatus status) {
  AllocationResult out;
  out.status = status;
  out.objective = objective;
  out.primal = primal;
  for (int id : m.candidates) {
    int pos = m.index.at(Quantity::SvcOn, c.bus_ordinal(id), -1);
    if (primal[pos] > 0.5) out.chosen_buses.push_back(id);
  }
  const int ns = static_cast<int>(scenarios.size());
  for (int s = 0; s < ns; ++s) {
    ScenarioMetrics met = extract_metrics(m, c, primal, s);
    ScenarioOutcome o;
    o.loss_mw = met.loss * c.base_mva;
    o.dev_w = met.dev_w;
    o.dev_v = met.dev_v;
    o.volt = met.volt;
    o.svc_b = met.svc_b;
    out.by_scenario.push_back(std::move(o));

    const double rho = scenarios[s].rho;
    out.loss_term += rho * met.loss;
    out.weighted_dev_w += rho * met.dev_w;
    out.weighted_dev_v += rho * met.dev_v;
    out.max_cone_mismatch =
        std::max(out.max_cone_mismatch, cone_mismatch(m, c, primal, s));
    for (int k = 0; k < static_cast<int>(c.branches.size()); ++k) {
      Quantity aux = c.branches[k].r > 0.0 ? Quantity::LossAuxP
                                           : Quantity::LossAuxQ;
      out.penalty_term += rho * primal[m.index.at(aux, k, s)];
    }
    for (int i = 0; i < static_cast<int>(c.buses.size()); ++i) {
      out.dev_term += rho * (primal[m.index.at(Quantity::DevUp, i, s)] +
                             primal[m.index.at(Quantity::DevDown, i, s)]);
    }
  }
  out.weighted_loss_mw = out.loss_term * c.base_mva;
  (void)w;
  return out;
}

}  // namespace

int select_branch_variable(const std::vector<double>& primal,
                           const MicpModel& m, double integrality_tol) {
  int best = -1;
  double best_frac = integrality_tol;
  for (int pos : m.index.delta_positions()) {
    double v = primal[pos];
    double frac = std::min(v, 1.0 - v);
    if (frac > best_frac + 1e-15) {
      best_frac = frac;
      best = pos;  // delta positions ascend with bus id: first win = lowest
    }
  }
  if (best < 0)
    throw ValidationError("branch called on an integral relaxation");
  return best;
}

std::vector<int> round_candidate(const std::vector<double>& primal,
                                 const MicpModel& m, int n_v,
                                 double integrality_tol) {
  std::vector<std::pair<double, int>> frac;  // (-value, bus id)
  for (std::size_t ci = 0; ci < m.candidates.size(); ++ci) {
    double v = primal[m.index.delta_positions()[ci]];
    if (v > integrality_tol) frac.push_back({-v, m.candidates[ci]});
  }
  std::stable_sort(frac.begin(), frac.end());
  std::vector<int> chosen;
  for (int i = 0; i < std::min<int>(n_v, static_cast<int>(frac.size())); ++i)
    chosen.push_back(frac[i].second);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

AllocationResult solve_fixed_allocation(const MicpModel& m,
                                        const NetworkCase& c,
                                        const ScenarioSet& scenarios,
                                        const WeightScheme& w,
                                        const std::vector<int>& chosen_bus_ids,
                                        const SolverSettings& settings) {
  std::set<int> chosen(chosen_bus_ids.begin(), chosen_bus_ids.end());
  std::map<int, int> fixings;
  for (std::size_t ci = 0; ci < m.candidates.size(); ++ci)
    fixings[m.index.delta_positions()[ci]] = chosen.count(m.candidates[ci]) ? 1 : 0;
  ConicSolution sol = solve_node(m.program, fixings, settings, -1);
  if (!usable(sol)) {
    AllocationResult out;
    out.status = sol.status;
    return out;
  }
  AllocationResult out =
      build_result(m, c, scenarios, w, sol.primal, sol.objective, sol.status);
  out.nodes = 1;
  return out;
}

AllocationResult solve_misocp(const MicpModel& m, const NetworkCase& c,
                              const ScenarioSet& scenarios,
                              const WeightScheme& w,
                              const BnbSettings& settings) {
  const auto t0 = Clock::now();
  if (m.index.delta_positions().empty())
    throw ValidationError("program has an empty integrality mask");

  struct Node {
    double bound;
    int id;
    int depth;
    std::map<int, int> fixings;
  };
  auto order = [](const Node& a, const Node& b) {
    return a.bound != b.bound ? a.bound > b.bound : a.id > b.id;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(order)> open(order);

  double incumbent_obj = kInf;
  std::vector<double> incumbent;
  int node_count = 0;
  int next_id = 0;
  auto log = [&](int id, int depth, double bound, int frac, const char* act) {
    if (settings.node_log)
      *settings.node_log << id << "," << depth << "," << bound << "," << frac
                         << "," << act << "\n";
  };
  if (settings.node_log)
    *settings.node_log << "node,depth,bound,fractional,action\n";

  auto fractional_count = [&](const std::vector<double>& primal) {
    int nfrac = 0;
    for (int pos : m.index.delta_positions()) {
      double v = primal[pos];
      if (std::min(v, 1.0 - v) > settings.integrality_tol) ++nfrac;
    }
    return nfrac;
  };

  auto try_incumbent = [&](const std::vector<double>& primal, double obj) {
    if (obj < incumbent_obj - 1e-12) {
      incumbent_obj = obj;
      incumbent = primal;
      return true;
    }
    return false;
  };

  std::set<std::vector<int>> tried_roundings;
  auto try_rounding = [&](const std::vector<double>& primal) {
    std::vector<int> guess =
        round_candidate(primal, m, m.svc.n_v, settings.integrality_tol);
    if (!tried_roundings.insert(guess).second) return;
    AllocationResult h =
        solve_fixed_allocation(m, c, scenarios, w, guess, settings.solver);
    ++node_count;
    if ((h.status == SolveStatus::Optimal ||
         h.status == SolveStatus::IterationLimit) &&
        !h.primal.empty())
      try_incumbent(h.primal, h.objective);
  };

  // root
  ConicSolution root = solve_node(m.program, {}, settings.solver, next_id);
  ++node_count;
  if (root.status == SolveStatus::Infeasible) {
    AllocationResult out;
    out.status = SolveStatus::Infeasible;
    out.nodes = node_count;
    out.wall_seconds = seconds_since(t0);
    return out;
  }
  if (!usable(root))
    throw SolveError("root relaxation: " + std::string(to_string(root.status)));

  double global_lb = root.objective;
  if (fractional_count(root.primal) == 0) {
    try_incumbent(root.primal, root.objective);
    log(0, 0, root.objective, 0, "incumbent");
  } else {
    try_rounding(root.primal);
    open.push({root.objective, next_id++, 0, {}});
    log(0, 0, root.objective, fractional_count(root.primal), "branched");
  }

  std::vector<double> node_primal;
  while (!open.empty() && node_count < settings.max_nodes) {
    Node node = open.top();
    open.pop();
    global_lb = node.bound;
    if (node.bound >= incumbent_obj - settings.abs_gap ||
        incumbent_obj - node.bound <=
            settings.rel_gap * std::max(1.0, std::abs(incumbent_obj))) {
      global_lb = std::min(node.bound, incumbent_obj);
      log(node.id, node.depth, node.bound, 0, "pruned");
      break;  // best-bound order: everything left is no better
    }

    ConicSolution sol =
        solve_node(m.program, node.fixings, settings.solver, node.id);
    ++node_count;
    if (sol.status == SolveStatus::Infeasible) {
      log(node.id, node.depth, node.bound, 0, "pruned");
      continue;
    }
    if (!usable(sol))
      throw SolveError("node " + std::to_string(node.id) + ": " +
                       to_string(sol.status));
    if (sol.objective >= incumbent_obj - settings.abs_gap) {
      log(node.id, node.depth, sol.objective, 0, "pruned");
      continue;
    }
    int nfrac = fractional_count(sol.primal);
    if (nfrac == 0) {
      if (try_incumbent(sol.primal, sol.objective))
        log(node.id, node.depth, sol.objective, 0, "incumbent");
      else
        log(node.id, node.depth, sol.objective, 0, "pruned");
      continue;
    }
    try_rounding(sol.primal);
    int pos = select_branch_variable(sol.primal, m, settings.integrality_tol);
    for (int val : {0, 1}) {
      Node child;
      child.bound = sol.objective;
      child.id = ++next_id;
      child.depth = node.depth + 1;
      child.fixings = node.fixings;
      child.fixings[pos] = val;
      open.push(std::move(child));
    }
    log(node.id, node.depth, sol.objective, nfrac, "branched");
  }

  if (incumbent.empty()) {
    AllocationResult out;
    out.status = open.empty() ? SolveStatus::Infeasible
                              : SolveStatus::IterationLimit;
    out.nodes = node_count;
    out.wall_seconds = seconds_since(t0);
    return out;
  }
  if (!open.empty() && node_count >= settings.max_nodes)
    global_lb = std::min(global_lb, open.top().bound);
  else if (open.empty())
    global_lb = incumbent_obj;

  AllocationResult out = build_result(m, c, scenarios, w, incumbent,
                                      incumbent_obj, SolveStatus::Optimal);
  out.bound_gap = std::max(0.0, incumbent_obj - global_lb);
  if (out.bound_gap > settings.abs_gap &&
      out.bound_gap > settings.rel_gap * std::max(1.0, std::abs(incumbent_obj)))
    out.status = SolveStatus::IterationLimit;  // node budget hit, honest gap
  out.nodes = node_count;
  out.wall_seconds = seconds_since(t0);
  return out;
}

}  // namespace svcplan
