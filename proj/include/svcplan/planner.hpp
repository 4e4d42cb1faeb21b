#pragma once

#include <optional>
#include <string>
#include <vector>

#include "svcplan/acpf.hpp"
#include "svcplan/bnb.hpp"
#include "svcplan/micp.hpp"
#include "svcplan/network.hpp"

namespace svcplan {

struct RunConfig {
  NetworkCase network;
  ScenarioSet scenarios;
  std::vector<WeightScheme> weight_cases;  // at least one
  std::vector<int> nv_values;              // budgets; baseline always runs
  double svc_b_min = 0.0;
  double svc_b_max = 0.3;
  double alpha = 1e-3;
  double eps_theta = 0.00872664625997164788;
  bool validate_ac = true;
  int workers = 1;
  BnbSettings bnb;
  std::string log_dir;  // when set, per-cell solver/node CSV logs are written
};

struct RunCell {
  int weight_case = 0;  // ordinal into weight_cases
  int nv = 0;           // -1 marks the baseline row
  bool ok = false;
  std::string error;
  AllocationResult allocation;
  std::optional<ValidationReport> validation;
};

struct RunReport {
  RunConfig config;
  std::vector<RunCell> cells;  // baselines first, then (case, nv) ascending
  bool all_ok = true;

  const RunCell* find(int weight_case, int nv) const;
};

// Executes the baseline plus every (weight case, budget) cell; failures are
// recorded per cell and do not stop the run.
RunReport run(const RunConfig& config);

// Output writers. report.json is byte-stable across reruns; wall times go
// to summary.csv only.
void write_report_json(const RunReport& r, const std::string& path);
void write_summary_csv(const RunReport& r, const std::string& path);
void write_loss_by_scenario_csv(const RunReport& r, int weight_case, int nv,
                                const std::string& path);
void write_voltage_profile_csv(const RunReport& r, int weight_case, int nv,
                               int scenario, const std::string& path);

// Writes the full output set under dir: report.json, table3.csv,
// loss_by_scenario*.csv, voltage_profile_s<k>*.csv.
void write_outputs(const RunReport& r, const std::string& dir);

}  // namespace svcplan
