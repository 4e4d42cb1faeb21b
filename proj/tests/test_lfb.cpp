#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "svcplan/lfb.hpp"
#include "svcplan/network.hpp"

using namespace svcplan;

namespace {

NetworkCase case30() {
  return load_case(std::string(SVCPLAN_DATA_DIR) + "/case30.m");
}

NetworkCase triangle() {
  return parse_case(R"(
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1 0 135 1 1.05 0.95;
  2 1 10 5 0 0 1 1 0 135 1 1.05 0.95;
  3 1 10 5 0 0 1 1 0 135 1 1.05 0.95;
];
mpc.gen = [ 1 0 0 100 -100 1 100 1 200 0; ];
mpc.branch = [
  1 2 0.01 0.1 0 0 0 0 0 0 1;
  2 3 0.01 0.1 0 0 0 0 0 0 1;
  3 1 0.01 0.1 0 0 0 0 0 0 1;
];
)");
}

}  // namespace

TEST_CASE("incidence signs for a single branch") {
  NetworkCase c = parse_case(R"(
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1 0 135 1 1.05 0.95;
  2 1 10 0 0 0 1 1 0 135 1 1.05 0.95;
];
mpc.gen = [ 1 0 0 100 -100 1 100 1 200 0; ];
mpc.branch = [ 1 2 0.01 0.1 0 0 0 0 0 0 1; ];
)");
  FlowIncidence inc = build_incidence(c);
  CHECK(inc.mf(0, 0) == 1);
  CHECK(inc.mf(1, 0) == -1);
  CHECK(inc.ml(0, 0) == 1);
  CHECK(inc.ml(1, 0) == 0);
}

TEST_CASE("incidence nonzero counts on the thirty bus case") {
  NetworkCase c = case30();
  FlowIncidence inc = build_incidence(c);
  int mf_nnz = 0, ml_nnz = 0, mf_colsum = 0;
  for (int k = 0; k < inc.num_branches; ++k) {
    for (int i = 0; i < inc.num_buses; ++i) {
      if (inc.mf(i, k)) ++mf_nnz;
      if (inc.ml(i, k)) ++ml_nnz;
      mf_colsum += inc.mf(i, k);
    }
  }
  CHECK(mf_nnz == 82);
  CHECK(ml_nnz == 41);
  CHECK(mf_colsum == 0);  // each column holds one +1 and one -1
}

TEST_CASE("cycle basis sizes") {
  CHECK(build_cycle_basis(triangle()).size() == 1);
  CHECK(build_cycle_basis(triangle()).loops[0].size() == 3);

  NetworkCase c = case30();
  CHECK(build_cycle_basis(c).size() == 12);  // 41 - 30 + 1

  // spanning tree: no loops
  NetworkCase tree = parse_case(R"(
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1 0 135 1 1.05 0.95;
  2 1 10 0 0 0 1 1 0 135 1 1.05 0.95;
  3 1 10 0 0 0 1 1 0 135 1 1.05 0.95;
];
mpc.gen = [ 1 0 0 100 -100 1 100 1 200 0; ];
mpc.branch = [
  1 2 0.01 0.1 0 0 0 0 0 0 1;
  2 3 0.01 0.1 0 0 0 0 0 0 1;
];
)");
  CHECK(build_cycle_basis(tree).size() == 0);
}

TEST_CASE("loops vanish on potential differences") {
  // with angles from bus potentials, the signed sum of per-branch angle
  // differences around every basis loop is exactly zero
  NetworkCase c = case30();
  CycleBasis basis = build_cycle_basis(c);
  FlowIncidence inc = build_incidence(c);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> theta(c.buses.size());
    for (double& t : theta) t = dist(rng);
    for (const auto& loop : basis.loops) {
      double sum = 0.0;
      for (auto [k, sign] : loop) {
        auto [f, t] = inc.ends[k];
        sum += sign * (theta[f] - theta[t]);
      }
      CHECK(std::abs(sum) < 1e-12);
    }
  }
}
