#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>

#include "doctest.h"
#include "svcplan/errors.hpp"
#include "svcplan/network.hpp"

using namespace svcplan;

namespace {

const char* kTwoBus = R"(
function mpc = two_bus
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1 0 135 1 1.05 0.95;
  2 1 100 0 0 0 1 1 0 135 1 1.05 0.95;
];
mpc.gen = [
  1 0 0 100 -100 1 100 1 200 0;
];
mpc.branch = [
  1 2 0.01 0.1 0 0 0 0 0 0 1;
];
)";

NetworkCase case30() {
  return load_case(std::string(SVCPLAN_DATA_DIR) + "/case30.m");
}

}  // namespace

TEST_CASE("thirty bus case parses with the study totals") {
  NetworkCase c = case30();
  CHECK(c.buses.size() == 30);
  CHECK(c.branches.size() == 41);
  CHECK(c.generators.size() == 6);
  CHECK(c.base_mva == 100.0);
  CHECK(c.total_load_p() * c.base_mva == doctest::Approx(260.0).epsilon(1e-9));
  CHECK(c.total_load_q() * c.base_mva == doctest::Approx(116.0).epsilon(1e-9));
  int transformers = 0;
  for (const Branch& k : c.branches)
    if (k.tau != 1.0 || k.theta_ps != 0.0) ++transformers;
  CHECK(transformers == 4);
}

TEST_CASE("two bus case parses") {
  NetworkCase c = parse_case(kTwoBus);
  CHECK(c.buses.size() == 2);
  CHECK(c.branches.size() == 1);
  CHECK(c.generators.size() == 1);
  CHECK(c.loads.size() == 1);
  CHECK(c.loads[0].p_base == doctest::Approx(1.0));
}

TEST_CASE("dangling branch reference is a validation error") {
  std::string text = kTwoBus;
  auto pos = text.find("1 2 0.01");
  text.replace(pos, 3, "1 99");
  CHECK_THROWS_AS((void)parse_case(text), ValidationError);
}

TEST_CASE("disconnected graph is rejected") {
  const char* text = R"(
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1 0 135 1 1.05 0.95;
  2 1 10 0 0 0 1 1 0 135 1 1.05 0.95;
  3 1 10 0 0 0 1 1 0 135 1 1.05 0.95;
];
mpc.gen = [ 1 0 0 100 -100 1 100 1 200 0; ];
mpc.branch = [ 1 2 0.01 0.1 0 0 0 0 0 0 1; ];
)";
  CHECK_THROWS_WITH_AS((void)parse_case(text),
                       doctest::Contains("not connected"), ValidationError);
}

TEST_CASE("parse errors carry line numbers") {
  std::string text = kTwoBus;
  auto pos = text.find("0.01");
  text.replace(pos, 4, "zzz");
  try {
    (void)parse_case(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("parse-serialize-parse round trip is exact") {
  for (const NetworkCase& c : {case30(), parse_case(kTwoBus)}) {
    NetworkCase again = parse_case(serialize_case(c));
    CHECK(again == c);
    NetworkCase third = parse_case(serialize_case(again));
    CHECK(third == again);
  }
}

TEST_CASE("round trip survives awkward conversions") {
  std::string text = kTwoBus;
  auto pos = text.find("1 2 0.01 0.1 0 0 0 0 0 0 1;");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 27, "1 2 0.01 0.1 0.043 21.7 0 0 0.978 -2.4 1;");
  NetworkCase c = parse_case(text);
  CHECK(c.branches[0].theta_ps != 0.0);
  NetworkCase again = parse_case(serialize_case(c));
  CHECK(again == c);
}

TEST_CASE("scenario table builds and checks probabilities") {
  ScenarioSet set = builtin_scenarios();
  REQUIRE(set.size() == 15);
  double sum = 0.0;
  for (const Scenario& s : set.scenarios) sum += s.rho;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(set[12].lambda == doctest::Approx(1.46));

  CHECK_NOTHROW((void)build_scenarios({{1.0, 1.0}}));
  CHECK_THROWS_AS((void)build_scenarios({{0.5, 0.8}, {0.4, 1.2}}),
                  ValidationError);
  CHECK_THROWS_AS((void)build_scenarios({{0.5, 0.8}, {0.5, -1.0}}),
                  ValidationError);
}

TEST_CASE("scenario csv parses") {
  ScenarioSet set = load_scenarios(std::string(SVCPLAN_DATA_DIR) +
                                   "/scenarios.csv");
  CHECK(set.size() == 15);
  CHECK_THROWS_AS((void)parse_scenarios_csv("rho;lambda\n1,1\n"), ParseError);
}

TEST_CASE("load scaling is pure and proportional") {
  NetworkCase c = case30();
  Scenario s13{0.02, 1.46};
  auto scaled = scale_loads(c, s13);
  REQUIRE(scaled.size() == c.loads.size());
  double total = 0.0;
  for (const Load& d : scaled) total += d.p_base;
  CHECK(total * c.base_mva == doctest::Approx(379.6).epsilon(1e-9));
  // case unchanged, no compounding
  CHECK(c.total_load_p() * c.base_mva == doctest::Approx(260.0));
  auto once = scale_loads(c, {1.0, 0.6});
  auto twice = scale_loads(c, {1.0, 0.6});
  CHECK(once[0].p_base == twice[0].p_base);
  auto ident = scale_loads(c, {1.0, 1.0});
  for (std::size_t i = 0; i < ident.size(); ++i) {
    CHECK(ident[i].p_base == c.loads[i].p_base);
    CHECK(ident[i].bus == c.loads[i].bus);
  }
}

TEST_CASE("candidates exclude generator buses") {
  NetworkCase c = case30();
  auto cand = candidate_buses(c);
  CHECK(cand.size() == 24);
  std::set<int> gen_buses;
  for (const Generator& g : c.generators) gen_buses.insert(g.bus);
  for (int id : cand) CHECK(gen_buses.count(id) == 0);
  CHECK(cand.size() + gen_buses.size() == c.buses.size());
  CHECK(std::is_sorted(cand.begin(), cand.end()));

  NetworkCase two = parse_case(kTwoBus);
  auto cand2 = candidate_buses(two);
  REQUIRE(cand2.size() == 1);
  CHECK(cand2[0] == 2);
}

TEST_CASE("bus susceptance aggregates charging halves with tap scaling") {
  const char* text = R"(
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 5 1 1 0 135 1 1.05 0.95;
  2 1 10 0 0 0 1 1 0 135 1 1.05 0.95;
];
mpc.gen = [ 1 0 0 100 -100 1 100 1 200 0; ];
mpc.branch = [ 1 2 0.01 0.1 0.04 0 0 0 2.0 0 1; ];
)";
  NetworkCase c = parse_case(text);
  auto b = bus_fixed_susceptance(c);
  CHECK(b[0] == doctest::Approx(0.05 + 0.02 / 4.0));
  CHECK(b[1] == doctest::Approx(0.02));
}
