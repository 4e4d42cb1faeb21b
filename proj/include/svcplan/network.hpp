#pragma once

#include <string>
#include <utility>
#include <vector>

namespace svcplan {

struct Bus {
  int id = 0;
  double v_min = 0.95;
  double v_max = 1.05;
  double shunt_b = 0.0;  // fixed shunt susceptance, p.u.
  bool is_candidate = false;

  bool operator==(const Bus&) const = default;
};

struct Branch {
  int from_bus = 0;
  int to_bus = 0;
  double r = 0.0;
  double x = 0.0;
  double b_ch = 0.0;      // total line charging susceptance, p.u.
  double tau = 1.0;       // tap ratio, 1.0 for plain lines
  double theta_ps = 0.0;  // phase shift, radians
  double s_max = 0.0;     // apparent power rating, p.u.; 0 = unlimited

  bool operator==(const Branch&) const = default;
};

struct Generator {
  int bus = 0;
  double p_min = 0.0, p_max = 0.0;
  double q_min = 0.0, q_max = 0.0;

  bool operator==(const Generator&) const = default;
};

struct Load {
  int bus = 0;
  double p_base = 0.0, q_base = 0.0;

  bool operator==(const Load&) const = default;
};

struct Scenario {
  double rho = 1.0;     // probability weight
  double lambda = 1.0;  // load multiplier
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;

  std::size_t size() const { return scenarios.size(); }
  const Scenario& operator[](std::size_t i) const { return scenarios[i]; }
};

struct NetworkCase {
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  std::vector<Load> loads;

  int bus_ordinal(int bus_id) const;  // -1 when absent
  double total_load_p() const;        // p.u.
  double total_load_q() const;

  bool operator==(const NetworkCase&) const = default;
};

// Parses the MATPOWER-style matrix text format (mpc.baseMVA / mpc.bus /
// mpc.gen / mpc.branch blocks). All quantities are normalized to per-unit
// on base_mva. Out-of-service rows are dropped. Throws ParseError with a
// line number, or ValidationError naming the violated invariant.
NetworkCase parse_case(const std::string& text);
NetworkCase load_case(const std::string& path);

// Emits the same matrix format parse_case reads; parse(serialize(c)) == c.
std::string serialize_case(const NetworkCase& c);

// Scenario table, probabilities must sum to 1 within 1e-6.
ScenarioSet build_scenarios(const std::vector<std::pair<double, double>>& rows);
ScenarioSet parse_scenarios_csv(const std::string& text);  // header rho,lambda
ScenarioSet load_scenarios(const std::string& path);
ScenarioSet builtin_scenarios();  // the 15-scenario load-uncertainty preset

// Per-scenario loads: (lambda * p_base, lambda * q_base), case unmodified.
std::vector<Load> scale_loads(const NetworkCase& c, const Scenario& s);

// All buses not hosting a generator, ascending id order.
std::vector<int> candidate_buses(const NetworkCase& c);

// Fixed bus susceptance: shunt plus incident line-charging halves, with the
// sending-side half divided by tau^2 for off-nominal taps. Indexed by bus
// ordinal.
std::vector<double> bus_fixed_susceptance(const NetworkCase& c);

}  // namespace svcplan
