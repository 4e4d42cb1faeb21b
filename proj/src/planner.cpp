#include "svcplan/planner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "svcplan/errors.hpp"

namespace svcplan {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

MicpModel build_cell_model(const RunConfig& cfg, int weight_case, int nv) {
  WeightScheme w = cfg.weight_cases[weight_case];
  w.alpha = cfg.alpha;
  SvcSpec svc{cfg.svc_b_min, cfg.svc_b_max, std::max(nv, 0)};
  ModelOptions opt{cfg.eps_theta};
  return build_micp(cfg.network, cfg.scenarios, w, svc, opt);
}

void run_cell(const RunConfig& cfg, RunCell& cell) {
  try {
    MicpModel model = build_cell_model(cfg, cell.weight_case, cell.nv);
    BnbSettings bnb = cfg.bnb;
    std::ofstream solver_log, node_log;
    if (!cfg.log_dir.empty()) {
      fs::create_directories(cfg.log_dir);
      std::string stem = cfg.log_dir + "/case" +
                         std::to_string(cell.weight_case + 1) + "_nv" +
                         std::to_string(std::max(cell.nv, 0));
      solver_log.open(stem + "_solver.csv");
      node_log.open(stem + "_nodes.csv");
      bnb.solver.iter_log = &solver_log;
      bnb.node_log = &node_log;
    }
    if (cell.nv < 0) {
      cell.allocation = solve_fixed_allocation(
          model, cfg.network, cfg.scenarios, model.weights, {}, bnb.solver);
    } else {
      cell.allocation =
          solve_misocp(model, cfg.network, cfg.scenarios, model.weights, bnb);
    }
    if (cell.allocation.status != SolveStatus::Optimal &&
        cell.allocation.status != SolveStatus::IterationLimit) {
      cell.error = std::string("solve status: ") +
                   to_string(cell.allocation.status);
      return;
    }
    if (cfg.validate_ac && !cell.allocation.primal.empty())
      cell.validation =
          validate(cell.allocation, model, cfg.network, cfg.scenarios);
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
}

std::string join_ids(const std::vector<int>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += " ";
    s += std::to_string(ids[i]);
  }
  return s;
}

}  // namespace

const RunCell* RunReport::find(int weight_case, int nv) const {
  for (const RunCell& c : cells)
    if (c.weight_case == weight_case && c.nv == nv) return &c;
  return nullptr;
}

RunReport run(const RunConfig& config) {
  if (config.weight_cases.empty())
    throw ValidationError("run: no weight cases configured");
  RunReport rep;
  rep.config = config;

  for (int w = 0; w < static_cast<int>(config.weight_cases.size()); ++w) {
    rep.cells.push_back({w, -1});
    for (int nv : config.nv_values) {
      if (nv < 0) throw ValidationError("run: negative budget");
      rep.cells.push_back({w, nv});
    }
  }

  const int workers = std::max(1, config.workers);
  if (workers == 1) {
    for (RunCell& cell : rep.cells) run_cell(config, cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= rep.cells.size()) return;
          run_cell(config, rep.cells[i]);
        }
      });
    for (auto& th : pool) th.join();
  }
  for (const RunCell& c : rep.cells)
    if (!c.ok) rep.all_ok = false;
  return rep;
}

void write_report_json(const RunReport& r, const std::string& path) {
  Json j;
  const NetworkCase& net = r.config.network;
  j["case"] = {{"buses", net.buses.size()},
               {"branches", net.branches.size()},
               {"generators", net.generators.size()},
               {"base_mva", net.base_mva},
               {"total_load_mw", net.total_load_p() * net.base_mva},
               {"total_load_mvar", net.total_load_q() * net.base_mva}};
  Json scen = Json::array();
  for (const Scenario& s : r.config.scenarios.scenarios)
    scen.push_back({{"rho", s.rho}, {"lambda", s.lambda}});
  j["scenarios"] = scen;
  Json weights = Json::array();
  for (const WeightScheme& w : r.config.weight_cases)
    weights.push_back({{"a1", w.a1}, {"a2", w.a2}});
  j["weights"] = weights;
  j["svc_range"] = {r.config.svc_b_min, r.config.svc_b_max};
  j["alpha"] = r.config.alpha;
  j["eps_theta"] = r.config.eps_theta;
  j["all_ok"] = r.all_ok;

  Json cells = Json::array();
  for (const RunCell& c : r.cells) {
    Json jc;
    jc["weight_case"] = c.weight_case + 1;
    jc["nv"] = std::max(c.nv, 0);
    jc["baseline"] = c.nv < 0;
    jc["ok"] = c.ok;
    if (!c.ok) {
      jc["error"] = c.error;
      cells.push_back(jc);
      continue;
    }
    const AllocationResult& a = c.allocation;
    jc["status"] = to_string(a.status);
    jc["objective"] = a.objective;
    jc["loss_mw"] = a.weighted_loss_mw;
    jc["dev_w_pu"] = a.weighted_dev_w;
    jc["dev_v_pu"] = a.weighted_dev_v;
    jc["locations"] = a.chosen_buses;
    jc["bound_gap"] = a.bound_gap;
    jc["nodes"] = a.nodes;
    jc["max_cone_mismatch"] = a.max_cone_mismatch;
    jc["objective_terms"] = {{"loss", a.loss_term},
                             {"deviation", a.dev_term},
                             {"penalty", a.penalty_term}};
    const std::vector<int> cand_ids = candidate_buses(r.config.network);
    Json per = Json::array();
    for (std::size_t s = 0; s < a.by_scenario.size(); ++s) {
      const ScenarioOutcome& o = a.by_scenario[s];
      Json jo;
      jo["scenario"] = s + 1;
      jo["loss_mw"] = o.loss_mw;
      jo["dev_w_pu"] = o.dev_w;
      jo["dev_v_pu"] = o.dev_v;
      Json svc = Json::object();
      for (std::size_t ci = 0; ci < o.svc_b.size(); ++ci)
        if (o.svc_b[ci] != 0.0)
          svc[std::to_string(cand_ids[ci])] = o.svc_b[ci];
      jo["svc_b"] = svc;
      per.push_back(jo);
    }
    jc["per_scenario"] = per;
    if (c.validation) {
      const ValidationReport& v = *c.validation;
      Json jv;
      jv["all_converged"] = v.all_converged;
      jv["max_loss_rel_err"] = v.max_loss_rel_err;
      jv["max_v_dev"] = v.max_v_dev;
      jv["max_loop_residual"] = v.max_loop_residual;
      jv["max_cone_mismatch"] = v.max_cone_mismatch;
      Json per_s = Json::array();
      for (std::size_t s = 0; s < v.by_scenario.size(); ++s) {
        const ScenarioValidation& sv = v.by_scenario[s];
        per_s.push_back({{"scenario", s + 1},
                         {"converged", sv.converged},
                         {"lfb_loss_mw", sv.lfb_loss_mw},
                         {"ac_loss_mw", sv.ac_loss_mw},
                         {"loss_rel_err", sv.loss_rel_err},
                         {"max_v_dev", sv.max_v_dev},
                         {"max_loop_residual", sv.max_loop_residual},
                         {"cone_mismatch", sv.cone_mismatch}});
      }
      jv["per_scenario"] = per_s;
      jc["validation"] = jv;
    }
    cells.push_back(jc);
  }
  j["cells"] = cells;

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << j.dump(2) << "\n";
}

void write_summary_csv(const RunReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << "case,a1,a2,nv,loss_mw,dev_w_pu,dev_v_pu,locations,max_cone_mismatch,"
         "bound_gap,nodes,time_s,status\n";
  for (const RunCell& c : r.cells) {
    const WeightScheme& w = r.config.weight_cases[c.weight_case];
    out << (c.weight_case + 1) << "," << w.a1 << "," << w.a2 << ","
        << std::max(c.nv, 0) << ",";
    if (!c.ok) {
      out << ",,,,,,," << "," << "error\n";
      continue;
    }
    const AllocationResult& a = c.allocation;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f", a.weighted_loss_mw,
                  a.weighted_dev_w, a.weighted_dev_v);
    out << buf << "," << join_ids(a.chosen_buses) << ",";
    std::snprintf(buf, sizeof buf, "%.3g,%.3g", a.max_cone_mismatch,
                  a.bound_gap);
    out << buf << "," << a.nodes << "," << a.wall_seconds << ","
        << to_string(a.status) << "\n";
  }
}

void write_loss_by_scenario_csv(const RunReport& r, int weight_case, int nv,
                                const std::string& path) {
  const RunCell* with = r.find(weight_case, nv);
  const RunCell* base = r.find(weight_case, -1);
  if (!with || !with->ok || !base || !base->ok)
    throw ValidationError("loss plot: missing cell for case " +
                          std::to_string(weight_case + 1) + " nv " +
                          std::to_string(nv));
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << "scenario,loss_no_svc,loss_with_svc\n";
  for (std::size_t s = 0; s < with->allocation.by_scenario.size(); ++s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f", s + 1,
                  base->allocation.by_scenario[s].loss_mw,
                  with->allocation.by_scenario[s].loss_mw);
    out << buf << "\n";
  }
}

void write_voltage_profile_csv(const RunReport& r, int weight_case, int nv,
                               int scenario, const std::string& path) {
  const RunCell* with = r.find(weight_case, nv);
  const RunCell* base = r.find(weight_case, -1);
  if (!with || !with->ok || !base || !base->ok)
    throw ValidationError("voltage plot: missing cell");
  if (scenario < 0 ||
      scenario >= static_cast<int>(with->allocation.by_scenario.size()))
    throw ValidationError("voltage plot: scenario " +
                          std::to_string(scenario + 1) + " out of range");
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << "bus,v_no_svc,v_with_svc\n";
  const auto& b = base->allocation.by_scenario[scenario].volt;
  const auto& wv = with->allocation.by_scenario[scenario].volt;
  for (std::size_t i = 0; i < wv.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f",
                  r.config.network.buses[i].id, b[i], wv[i]);
    out << buf << "\n";
  }
}

void write_outputs(const RunReport& r, const std::string& dir) {
  fs::create_directories(dir);
  write_report_json(r, dir + "/report.json");
  write_summary_csv(r, dir + "/table3.csv");

  // plot data: per weight case at its largest solved budget, voltage
  // profiles at the lightest and heaviest scenario
  int s_lo = 0, s_hi = 0;
  const auto& scen = r.config.scenarios.scenarios;
  for (int s = 0; s < static_cast<int>(scen.size()); ++s) {
    if (scen[s].lambda < scen[s_lo].lambda) s_lo = s;
    if (scen[s].lambda > scen[s_hi].lambda) s_hi = s;
  }
  const bool single = r.config.weight_cases.size() == 1;
  for (int w = 0; w < static_cast<int>(r.config.weight_cases.size()); ++w) {
    int best_nv = -1;
    for (const RunCell& c : r.cells)
      if (c.weight_case == w && c.nv > best_nv && c.ok) best_nv = c.nv;
    if (best_nv < 0) continue;
    std::string suffix = single ? "" : "_case" + std::to_string(w + 1);
    write_loss_by_scenario_csv(r, w, best_nv,
                               dir + "/loss_by_scenario" + suffix + ".csv");
    for (int s : {s_lo, s_hi}) {
      write_voltage_profile_csv(
          r, w, best_nv, s,
          dir + "/voltage_profile_s" + std::to_string(s + 1) + suffix + ".csv");
      if (s_lo == s_hi) break;
    }
  }
}

}  // namespace svcplan
