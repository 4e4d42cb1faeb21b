#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "svcplan/errors.hpp"
#include "svcplan/micp.hpp"
#include "svcplan/solver.hpp"

using namespace svcplan;

namespace {

NetworkCase case30() {
  return load_case(std::string(SVCPLAN_DATA_DIR) + "/case30.m");
}

const char* kTwoBus = R"(
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1 0 135 1 1.05 0.95;
  2 1 50 20 0 2 1 1 0 135 1 1.05 0.95;
];
mpc.gen = [ 1 0 0 100 -100 1 100 1 200 0; ];
mpc.branch = [ 1 2 0.02 0.06 0.04 0 0 0 0 0 1; ];
)";

ScenarioSet one_scenario() { return build_scenarios({{1.0, 1.0}}); }

int count_rows(const MicpModel& m, RowKind kind) {
  int n = 0;
  for (const RowInfo& r : m.rows)
    if (r.kind == kind) ++n;
  return n;
}

}  // namespace

TEST_CASE("index layout and round trip") {
  NetworkCase c = case30();
  ScenarioSet scen = builtin_scenarios();
  MicpIndex ix = allocate_index(c, scen, candidate_buses(c));
  CHECK(ix.delta_positions().size() == 24);

  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(0, ix.size() - 1);
  for (int probe = 0; probe < 1000; ++probe) {
    int pos = pick(rng);
    const VarKey& k = ix.key(pos);
    CHECK(ix.at(k.qty, k.entity, k.scenario) == pos);
  }

  NetworkCase two = parse_case(kTwoBus);
  MicpIndex ix2 = allocate_index(two, one_scenario(), candidate_buses(two));
  CHECK(ix2.delta_positions().size() == 1);
}

TEST_CASE("build is deterministic") {
  NetworkCase c = case30();
  ScenarioSet scen = builtin_scenarios();
  MicpModel a = build_micp(c, scen, WeightScheme::preset(2), {0.0, 0.3, 3});
  MicpModel b = build_micp(c, scen, WeightScheme::preset(2), {0.0, 0.3, 3});
  CHECK(a.program.serialize() == b.program.serialize());

  MicpModel c1 = build_micp(c, scen, WeightScheme::preset(1), {0.0, 0.3, 3});
  // weight cases differ only in the objective
  CHECK(c1.program.a == a.program.a);
  CHECK(c1.program.rhs == a.program.rhs);
  CHECK(c1.program.objective != a.program.objective);
}

TEST_CASE("structure counts") {
  NetworkCase c = case30();
  ScenarioSet scen = builtin_scenarios();
  MicpModel m = build_micp(c, scen, WeightScheme::preset(1), {0.0, 0.3, 5});
  CHECK(m.num_loops == 12);
  CHECK(count_rows(m, RowKind::LoopBandUp) == 12 * 15);
  CHECK(count_rows(m, RowKind::LoopBandDown) == 12 * 15);
  CHECK(count_rows(m, RowKind::RealBalance) == 30 * 15);
  CHECK(count_rows(m, RowKind::ReactiveBalance) == 30 * 15);
  CHECK(count_rows(m, RowKind::VoltageDrop) == 41 * 15);
  int loss_cones = 0;
  for (const ConeInfo& ci : m.cones)
    if (ci.use == ConeUse::Loss) {
      ++loss_cones;
      CHECK(m.program.blocks[ci.block].kind == ConeKind::RSoc);
    }
  CHECK(loss_cones == 41 * 15);
  CHECK(count_rows(m, RowKind::Budget) == 1);

  MicpModel two = build_micp(parse_case(kTwoBus), one_scenario(),
                             WeightScheme::preset(1), {0.0, 0.3, 1});
  CHECK(count_rows(two, RowKind::VoltageDrop) == 1);
  CHECK(count_rows(two, RowKind::RealBalance) == 2);
  CHECK(count_rows(two, RowKind::LoopBandUp) == 0);
  CHECK(two.cones.size() == 1);  // unlimited rating: loss cone only
}

TEST_CASE("voltage bounds are squared case limits") {
  NetworkCase c = case30();
  ScenarioSet scen = one_scenario();
  MicpModel m = build_micp(c, scen, WeightScheme::preset(1), {0.0, 0.3, 1});
  for (int i = 0; i < 30; ++i) {
    int w = m.index.at(Quantity::VoltSq, i, 0);
    CHECK(m.program.lo[w] == doctest::Approx(0.95 * 0.95));
    CHECK(m.program.hi[w] == doctest::Approx(1.05 * 1.05));
  }
  for (int pos : m.index.delta_positions()) {
    CHECK(m.program.integer_mask[pos] == 1);
    CHECK(m.program.lo[pos] == 0.0);
    CHECK(m.program.hi[pos] == 1.0);
  }
}

TEST_CASE("objective structure per weight case") {
  NetworkCase c = parse_case(kTwoBus);
  ScenarioSet scen = one_scenario();
  MicpModel m1 = build_micp(c, scen, WeightScheme::preset(1), {0.0, 0.3, 1});
  // case 1: no deviation weight
  for (int i = 0; i < 2; ++i) {
    CHECK(m1.program.objective[m1.index.at(Quantity::DevUp, i, 0)] == 0.0);
    CHECK(m1.program.objective[m1.index.at(Quantity::DevDown, i, 0)] == 0.0);
  }
  CHECK(m1.program.objective[m1.index.at(Quantity::LossP, 0, 0)] ==
        doctest::Approx(1.0));
  CHECK(m1.program.objective[m1.index.at(Quantity::LossAuxP, 0, 0)] ==
        doctest::Approx(1e-3));

  // objective is linear in the scenario weights
  ScenarioSet doubled;
  doubled.scenarios = {{2.0, 1.0}};  // direct construction, weights unchecked
  MicpModel m2 = build_micp(c, doubled, WeightScheme::preset(1), {0.0, 0.3, 1});
  for (int i = 0; i < m1.program.num_vars; ++i)
    CHECK(m2.program.objective[i] == doctest::Approx(2.0 * m1.program.objective[i]));
}

TEST_CASE("reactive balance carries svc injections only at candidates") {
  NetworkCase c = case30();
  MicpModel m = build_micp(c, one_scenario(), WeightScheme::preset(1),
                           {0.0, 0.3, 1});
  // collect reactive-balance rows by bus ordinal
  std::map<int, std::map<int, double>> row_cols;  // row -> col -> coef
  for (const Triplet& t : m.program.a) row_cols[t.row][t.col] += t.val;
  for (int r = 0; r < m.program.num_rows; ++r) {
    if (m.rows[r].kind != RowKind::ReactiveBalance) continue;
    int bus_ord = m.rows[r].entity;
    int qv = m.index.find(Quantity::SvcQ, bus_ord, 0);
    bool is_cand = c.buses[bus_ord].is_candidate;
    if (is_cand) {
      REQUIRE(qv >= 0);
      CHECK(row_cols[r].count(qv) == 1);
    } else {
      CHECK(qv == -1);
    }
  }
}

TEST_CASE("deviation slacks recover the absolute value") {
  // the emitted pattern: W - 1 + up - down = 0 with nonnegative slacks;
  // minimal up+down equals |W-1| (brute-force oracle over a fine grid)
  for (double w : {1.0, 1.05, 0.94}) {
    double best = 1e9;
    for (int i = 0; i <= 2000; ++i) {
      for (int j = 0; j <= 2000; ++j) {
        double up = i * 1e-4, down = j * 1e-4;
        if (std::abs(w - 1.0 + up - down) < 5e-5) {
          best = std::min(best, up + down);
          break;
        }
      }
    }
    double expect = w == 1.0 ? 0.0 : (w > 1.0 ? w - 1.0 : 1.0 - w);
    CHECK(best == doctest::Approx(expect).epsilon(1e-3).scale(1.0));

    // same answer through the emitted rows and the conic solver
    ProgramBuilder pb;
    int wv = pb.add_var(w, w);
    int up = pb.add_nonneg();
    int down = pb.add_nonneg();
    int r = pb.add_row(1.0);
    pb.coef(r, wv, 1.0);
    pb.coef(r, up, 1.0);
    pb.coef(r, down, -1.0);
    pb.obj(up, 1.0);
    pb.obj(down, 1.0);
    ConicSolution sol = solve(pb.finish());
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(expect).epsilon(1e-7).scale(1.0));
    CHECK(sol.primal[up] * sol.primal[down] ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  }
}

TEST_CASE("install-flag linearization matches its trilinear target") {
  // rows emitted for a candidate bus, verified structurally, then the
  // projected SvcQ interval against {flag * b * W : b in [b_min, b_max]}
  NetworkCase c = parse_case(kTwoBus);
  SvcSpec svc{0.0, 0.3, 1};
  MicpModel m = build_micp(c, one_scenario(), WeightScheme::preset(2), svc);
  const Bus& bus = c.buses[1];
  const double lo = bus.v_min * bus.v_min, hi = bus.v_max * bus.v_max;

  std::map<int, std::map<int, double>> rows;
  for (const Triplet& t : m.program.a) rows[t.row][t.col] += t.val;
  int qv = m.index.at(Quantity::SvcQ, 1, 0);
  int gate = m.index.at(Quantity::SvcGate, 1, 0);
  int flag = m.index.at(Quantity::SvcOn, 1, -1);
  int w = m.index.at(Quantity::VoltSq, 1, 0);
  for (int r = 0; r < m.program.num_rows; ++r) {
    switch (m.rows[r].kind) {
      case RowKind::SvcRangeHi:
        CHECK(rows[r][qv] == 1.0);
        CHECK(rows[r][gate] == doctest::Approx(-svc.b_max));
        break;
      case RowKind::GateOnHi:
        CHECK(rows[r][gate] == 1.0);
        CHECK(rows[r][flag] == doctest::Approx(-hi));
        break;
      case RowKind::GateVoltLo:
        CHECK(rows[r][w] == 1.0);
        CHECK(rows[r][flag] == doctest::Approx(hi));
        CHECK(rows[r][gate] == -1.0);
        CHECK(m.program.rhs[r] == doctest::Approx(hi));
        break;
      case RowKind::GateVoltHi:
        CHECK(rows[r][gate] == 1.0);
        CHECK(rows[r][w] == -1.0);
        CHECK(rows[r][flag] == doctest::Approx(-lo));
        CHECK(m.program.rhs[r] == doctest::Approx(-lo));
        break;
      default:
        break;
    }
  }

  // projection oracle over a dense grid: z-interval then SvcQ-interval
  for (int delta : {0, 1}) {
    for (int gi = 0; gi < 100; ++gi) {
      double wv = lo + (hi - lo) * gi / 99.0;
      double z_lo = std::max(delta * lo, wv - (1 - delta) * hi);
      double z_hi = std::min(delta * hi, wv - (1 - delta) * lo);
      REQUIRE(z_lo <= z_hi + 1e-12);
      double q_lo = z_lo * svc.b_min, q_hi = z_hi * svc.b_max;
      double want_lo = delta * svc.b_min * wv, want_hi = delta * svc.b_max * wv;
      CHECK(q_lo == doctest::Approx(want_lo).epsilon(1e-9).scale(1.0));
      CHECK(q_hi == doctest::Approx(want_hi).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("two-bus optimum matches a dense grid search") {
  NetworkCase c = parse_case(kTwoBus);
  WeightScheme w = WeightScheme::preset(2);
  SvcSpec svc{0.0, 0.3, 1};
  MicpModel m = build_micp(c, one_scenario(), w, svc);

  const Branch& br = c.branches[0];
  const double p0 = c.loads[0].p_base, q0 = c.loads[0].q_base;
  const double b2 = bus_fixed_susceptance(c)[1];

  // flags fixed to zero: flows are a function of the receiving voltage
  auto objective_at = [&](double w2, double qv) {
    double pr = p0;
    double qr = q0 - b2 * w2 - qv;
    double pl = br.r * (pr * pr + qr * qr) / w2;
    double ql = pl * br.x / br.r;
    double w1 = w2 + 2 * br.r * pr + 2 * br.x * qr + br.r * pl + br.x * ql;
    if (w1 < 0.9025 - 1e-12 || w1 > 1.1025 + 1e-12) return 1e9;
    double aux = pl / (2 * br.r);
    return w.a1 * pl + w.a2 * (std::abs(w1 - 1.0) + std::abs(w2 - 1.0)) +
           w.alpha * aux;
  };

  {
    double best = 1e9;
    for (int i = 0; i <= 2000; ++i) {
      double w2 = 0.9025 + (1.1025 - 0.9025) * i / 2000.0;
      best = std::min(best, objective_at(w2, 0.0));
    }
    ConicSolution sol = solve_with_fixings(
        m.program, {{m.index.delta_positions()[0], 0}});
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(best).epsilon(2e-3));
  }
  {
    double best = 1e9;
    for (int i = 0; i <= 400; ++i) {
      double w2 = 0.9025 + (1.1025 - 0.9025) * i / 400.0;
      for (int j = 0; j <= 400; ++j)
        best = std::min(best, objective_at(w2, 0.3 * w2 * j / 400.0));
    }
    ConicSolution sol = solve_with_fixings(
        m.program, {{m.index.delta_positions()[0], 1}});
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(best).epsilon(2e-3));
    // loss cone tight at the optimum: Pl * W = r (P^2 + Q^2) holds
    double pl = sol.primal[m.index.at(Quantity::LossP, 0, 0)];
    double w2 = sol.primal[m.index.at(Quantity::VoltSq, 1, 0)];
    double pr = sol.primal[m.index.at(Quantity::FlowP, 0, 0)];
    double qr = sol.primal[m.index.at(Quantity::FlowQ, 0, 0)];
    CHECK(pl * w2 == doctest::Approx(br.r * (pr * pr + qr * qr)).epsilon(1e-5));
  }
}

TEST_CASE("scenario blocks separate once flags are fixed") {
  NetworkCase c = case30();
  ScenarioSet joint;
  joint.scenarios = {{0.3, 0.8}, {0.7, 1.1}};
  WeightScheme w = WeightScheme::preset(2);
  SvcSpec svc{0.0, 0.3, 0};
  MicpModel mj = build_micp(c, joint, w, svc);
  std::map<int, int> all_zero;
  for (int pos : mj.index.delta_positions()) all_zero[pos] = 0;
  ConicSolution sj = solve_with_fixings(mj.program, all_zero);
  REQUIRE(sj.status == SolveStatus::Optimal);

  double split_total = 0.0;
  for (auto [rho, lambda] : {std::pair{0.3, 0.8}, std::pair{0.7, 1.1}}) {
    ScenarioSet single;
    single.scenarios = {{1.0, lambda}};
    MicpModel ms = build_micp(c, single, w, svc);
    std::map<int, int> zero;
    for (int pos : ms.index.delta_positions()) zero[pos] = 0;
    ConicSolution ss = solve_with_fixings(ms.program, zero);
    REQUIRE(ss.status == SolveStatus::Optimal);
    split_total += rho * ss.objective;
  }
  CHECK(sj.objective == doctest::Approx(split_total).epsilon(1e-6));
}

TEST_CASE("lossless branches keep their reactive cone") {
  const char* text = R"(
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1 0 135 1 1.05 0.95;
  2 1 30 10 0 0 1 1 0 135 1 1.05 0.95;
];
mpc.gen = [ 1 0 0 100 -100 1 100 1 200 0; ];
mpc.branch = [ 1 2 0 0.1 0 0 0 0 0 0 1; ];
)";
  NetworkCase c = parse_case(text);
  MicpModel m = build_micp(c, one_scenario(), WeightScheme::preset(1),
                           {0.0, 0.3, 0});
  CHECK(m.index.find(Quantity::LossAuxP, 0, 0) == -1);
  CHECK(m.index.find(Quantity::LossAuxQ, 0, 0) >= 0);
  ConicSolution sol = solve_with_fixings(
      m.program, {{m.index.delta_positions()[0], 0}});
  REQUIRE(sol.status == SolveStatus::Optimal);
  double pl = sol.primal[m.index.at(Quantity::LossP, 0, 0)];
  double ql = sol.primal[m.index.at(Quantity::LossQ, 0, 0)];
  double pr = sol.primal[m.index.at(Quantity::FlowP, 0, 0)];
  double qr = sol.primal[m.index.at(Quantity::FlowQ, 0, 0)];
  double w2 = sol.primal[m.index.at(Quantity::VoltSq, 1, 0)];
  CHECK(pl == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
  // reactive loss x |I|^2 through its own cone, driven tight by the penalty
  CHECK(ql == doctest::Approx(0.1 * (pr * pr + qr * qr) / w2).epsilon(1e-4));
  CHECK(cone_mismatch(m, c, sol.primal, 0) <= 1e-4);
}

TEST_CASE("budget row forces flags at zero budget") {
  NetworkCase c = parse_case(kTwoBus);
  MicpModel m = build_micp(c, one_scenario(), WeightScheme::preset(2),
                           {0.0, 0.3, 0});
  ConicSolution sol = solve(m.program);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal[m.index.delta_positions()[0]] ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
}

TEST_CASE("nonpositive reactance is rejected") {
  NetworkCase c = parse_case(kTwoBus);
  c.branches[0].x = 0.0;
  CHECK_THROWS_AS(build_micp(c, one_scenario(), WeightScheme::preset(1),
                             {0.0, 0.3, 1}),
                  ValidationError);
}

TEST_CASE("scenario dump lists the assembled rows") {
  NetworkCase c = parse_case(kTwoBus);
  MicpModel m = build_micp(c, one_scenario(), WeightScheme::preset(2),
                           {0.0, 0.3, 1});
  std::string listing = dump_scenario(m, c, 0);
  CHECK(listing.find("voltage-drop[0]") != std::string::npos);
  CHECK(listing.find("loss-cone[0]") != std::string::npos);
  CHECK(listing.find("budget") != std::string::npos);
}
