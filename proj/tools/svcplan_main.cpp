// Planning driver: loads a case and scenario set, sweeps SVC budgets and
// weighting schemes through the shared library, and writes the report set.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "svcplan.h"

namespace {

int fail(const char* what) {
  std::fprintf(stderr, "error: %s: %s\n", what, svcplan_last_error());
  return 2;
}

bool parse_weights(const std::string& spec, svcplan_run_options& opt) {
  static const double presets[4][2] = {{1, 0}, {1, 1}, {10, 1}, {1, 10}};
  opt.weight_case_count = 0;
  auto push = [&](double a1, double a2) {
    if (opt.weight_case_count >= SVCPLAN_MAX_WEIGHT_CASES) return false;
    opt.a1[opt.weight_case_count] = a1;
    opt.a2[opt.weight_case_count] = a2;
    ++opt.weight_case_count;
    return true;
  };
  if (spec == "all") {
    for (auto& p : presets)
      if (!push(p[0], p[1])) return false;
    return true;
  }
  if (spec.rfind("case", 0) == 0 && spec.size() == 5) {
    int id = spec[4] - '0';
    if (id < 1 || id > 4) return false;
    return push(presets[id - 1][0], presets[id - 1][1]);
  }
  double a1, a2;
  if (std::sscanf(spec.c_str(), "%lf,%lf", &a1, &a2) == 2)
    return push(a1, a2);
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SVC placement planner"};
  app.set_version_flag("--version", svcplan_version());

  std::string case_path;
  std::string scen_path;
  std::string weights = "all";
  std::vector<int> nv = {1, 2, 3, 4, 5};
  double alpha = 1e-3;
  double eps_theta = 0.00872664625997164788;
  std::pair<double, double> svc_range{0.0, 0.3};
  bool validate = false;
  std::string out_dir = "out";
  int workers = 1;
  int seed = 0;
  bool logs = false;

  app.add_option("--case", case_path, "case file (matrix text format)")
      ->required();
  app.add_option("--scenarios", scen_path,
                 "scenario CSV (rho,lambda); default: built-in 15-scenario set");
  app.add_option("--weights", weights,
                 "case1|case2|case3|case4|all|a1,a2 (loss and deviation weights)");
  app.add_option("--nv", nv, "installation budgets to sweep")->delimiter(',');
  app.add_option("--alpha", alpha, "loss-cone penalty scale");
  app.add_option("--eps-theta", eps_theta, "loop angle band (radians)");
  app.add_option("--svc-range", svc_range,
                 "susceptance range lo,hi (p.u.)")->delimiter(',');
  app.add_flag("--validate", validate, "run the nonlinear power-flow check");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "parallel cells");
  app.add_option("--seed", seed, "accepted for interface stability (unused)");
  app.add_flag("--logs", logs, "write per-cell solver and search logs");
  CLI11_PARSE(app, argc, argv);
  (void)seed;

  svcplan_run_options opt;
  svcplan_run_options_init(&opt);
  if (!parse_weights(weights, opt)) {
    std::fprintf(stderr, "error: bad --weights '%s'\n", weights.c_str());
    return 2;
  }
  if (nv.size() > SVCPLAN_MAX_NV) {
    std::fprintf(stderr, "error: too many --nv values\n");
    return 2;
  }
  opt.nv_count = static_cast<int>(nv.size());
  for (std::size_t i = 0; i < nv.size(); ++i) opt.nv[i] = nv[i];
  opt.svc_b_min = svc_range.first;
  opt.svc_b_max = svc_range.second;
  opt.alpha = alpha;
  opt.eps_theta = eps_theta;
  opt.validate_ac = validate ? 1 : 0;
  opt.workers = workers;
  std::string log_dir = out_dir + "/logs";
  if (logs) opt.log_dir = log_dir.c_str();

  svcplan_case* net = nullptr;
  if (svcplan_case_load(case_path.c_str(), &net) != SVCPLAN_OK)
    return fail("loading case");
  std::printf("case: %d buses, %d branches, %d generators, %.1f MW / %.1f MVar\n",
              svcplan_case_bus_count(net), svcplan_case_branch_count(net),
              svcplan_case_generator_count(net), svcplan_case_load_mw(net),
              svcplan_case_load_mvar(net));

  svcplan_scenarios* scen = nullptr;
  svcplan_status st = scen_path.empty()
                          ? svcplan_scenarios_builtin(&scen)
                          : svcplan_scenarios_load(scen_path.c_str(), &scen);
  if (st != SVCPLAN_OK) {
    svcplan_case_free(net);
    return fail("loading scenarios");
  }
  std::printf("scenarios: %d\n", svcplan_scenarios_count(scen));

  svcplan_report* rep = nullptr;
  if (svcplan_run(net, scen, &opt, &rep) != SVCPLAN_OK) {
    svcplan_scenarios_free(scen);
    svcplan_case_free(net);
    return fail("run");
  }

  std::printf("%-6s %-4s %-10s %-10s %-22s %-10s %-8s %s\n", "case", "nv",
              "loss(MW)", "dV(p.u.)", "locations", "cone-err", "nodes",
              "time(s)");
  int cells = svcplan_report_cell_count(rep);
  for (int i = 0; i < cells; ++i) {
    int wc, nvv, base, ok;
    svcplan_report_cell_info(rep, i, &wc, &nvv, &base, &ok);
    if (!ok) {
      char err[256];
      svcplan_report_cell_error(rep, i, err, sizeof err);
      std::printf("%-6d %-4d failed: %s\n", wc, nvv, err);
      continue;
    }
    double loss, dw, dv, obj, gap, cone, secs;
    int nodes;
    svcplan_report_cell_metrics(rep, i, &loss, &dw, &dv, &obj, &gap, &cone,
                                &secs, &nodes);
    int buses[64];
    size_t nbuses = 0;
    svcplan_report_cell_locations(rep, i, buses, 64, &nbuses);
    std::string locs = base ? "(baseline)" : "";
    for (size_t b = 0; b < nbuses; ++b)
      locs += (b ? "," : "") + std::to_string(buses[b]);
    std::printf("%-6d %-4d %-10.3f %-10.3f %-22s %-10.2e %-8d %.1f\n", wc, nvv,
                loss, dw, locs.c_str(), cone, nodes, secs);
    if (validate) {
      int conv;
      double lerr, vdev, loop;
      if (svcplan_report_cell_validation(rep, i, &conv, &lerr, &vdev, &loop) ==
          SVCPLAN_OK)
        std::printf("       ac check: converged=%d loss-err=%.2f%% vdev=%.4f "
                    "loop=%.2e\n",
                    conv, 100.0 * lerr, vdev, loop);
    }
  }

  int rc = 0;
  if (svcplan_report_write(rep, out_dir.c_str()) != SVCPLAN_OK)
    rc = fail("writing outputs");
  else
    std::printf("outputs written to %s\n", out_dir.c_str());
  if (!svcplan_report_all_ok(rep)) rc = 1;

  svcplan_report_free(rep);
  svcplan_scenarios_free(scen);
  svcplan_case_free(net);
  return rc;
}
