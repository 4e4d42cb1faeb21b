#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "svcplan/errors.hpp"
#include "lp_oracle.hpp"
#include "svcplan/solver.hpp"

using namespace svcplan;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

namespace {

ConicProgram lp_program(const Mat& a, const Vec& b, const Vec& c) {
  ProgramBuilder pb;
  for (int j = 0; j < a.cols(); ++j) {
    int v = pb.add_nonneg();
    pb.obj(v, c[j]);
  }
  for (int i = 0; i < a.rows(); ++i) {
    int r = pb.add_row(b[i]);
    for (int j = 0; j < a.cols(); ++j) pb.coef(r, j, a(i, j));
  }
  return pb.finish();
}

}  // namespace

TEST_CASE("bound-active lp") {
  ProgramBuilder pb;
  int x = pb.add_var(1.0, kInf);
  pb.obj(x, 1.0);
  ConicSolution sol = solve(pb.finish());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal[x] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("analytic second-order cone") {
  ProgramBuilder pb;
  int t = pb.add_cone(ConeKind::Soc, 3);
  pb.set_bounds(t + 1, 3.0, 3.0);
  pb.set_bounds(t + 2, 4.0, 4.0);
  pb.obj(t, 1.0);
  ConicSolution sol = solve(pb.finish());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("analytic rotated cone") {
  ProgramBuilder pb;
  int u = pb.add_cone(ConeKind::RSoc, 3);
  pb.set_bounds(u + 1, 1.0, 1.0);
  pb.set_bounds(u + 2, 2.0, 2.0);
  pb.obj(u, 1.0);
  ConicSolution sol = solve(pb.finish());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(sol.primal[u] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("infeasible and unbounded are certified") {
  {
    ProgramBuilder pb;
    int x = pb.add_nonneg();
    int r = pb.add_row(-1.0);
    pb.coef(r, x, 1.0);
    pb.obj(x, 1.0);
    ConicSolution sol = solve(pb.finish());
    CHECK(sol.status == SolveStatus::Infeasible);
  }
  {
    ProgramBuilder pb;
    int x = pb.add_nonneg();
    pb.obj(x, -1.0);
    ConicSolution sol = solve(pb.finish());
    CHECK(sol.status == SolveStatus::Unbounded);
  }
}

TEST_CASE("random lps match the dense simplex oracle") {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> mdist(2, 20), ndist(5, 50);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.0, 2.0);
  int done = 0;
  for (int trial = 0; done < 100; ++trial) {
    REQUIRE(trial < 200);
    int m = mdist(rng);
    int n = std::max(ndist(rng), m + 1);
    Mat a(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = val(rng);
    Vec x0(n), y(m), s(n);
    for (int j = 0; j < n; ++j) x0[j] = pos(rng);
    for (int i = 0; i < m; ++i) y[i] = val(rng);
    for (int j = 0; j < n; ++j) s[j] = pos(rng);
    Vec b = a * x0;                    // primal feasible
    Vec c = a.transpose() * y + s;     // dual feasible: bounded
    ConicSolution sol = solve(lp_program(a, b, c));
    REQUIRE(sol.status == SolveStatus::Optimal);
    double oracle = svcplan_test::simplex_oracle(a, b, c);
    CHECK(sol.objective ==
          doctest::Approx(oracle).epsilon(1e-6).scale(std::max(1.0, std::abs(oracle))));
    ++done;
  }
}

TEST_CASE("objective scaling leaves the argmin unchanged") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  Mat a(3, 8);
  Vec x0(8), c(8);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 8; ++j) a(i, j) = val(rng);
  for (int j = 0; j < 8; ++j) {
    x0[j] = std::abs(val(rng)) + 0.1;
    c[j] = val(rng) + 2.0;  // positive costs keep it bounded
  }
  Vec b = a * x0;
  ConicSolution s1 = solve(lp_program(a, b, c));
  ConicSolution s2 = solve(lp_program(a, b, 1000.0 * c));
  REQUIRE(s1.status == SolveStatus::Optimal);
  REQUIRE(s2.status == SolveStatus::Optimal);
  for (int j = 0; j < 8; ++j)
    CHECK(s1.primal[j] == doctest::Approx(s2.primal[j]).epsilon(1e-6).scale(1.0));
}

TEST_CASE("solves are deterministic") {
  ProgramBuilder pb;
  int t = pb.add_cone(ConeKind::Soc, 4);
  pb.set_bounds(t + 1, 1.0, 1.0);
  pb.set_bounds(t + 2, 2.0, 2.0);
  pb.set_bounds(t + 3, -0.5, -0.5);
  pb.obj(t, 1.0);
  ConicProgram p = pb.finish();
  ConicSolution a = solve(p), b = solve(p);
  REQUIRE(a.status == SolveStatus::Optimal);
  CHECK(a.iterations == b.iterations);
  CHECK(a.primal == b.primal);
}

TEST_CASE("weak duality check stays quiet on a clean solve") {
  SolverSettings st;
  st.check_duality = true;
  ProgramBuilder pb;
  int x = pb.add_var(1.0, 4.0);
  int y = pb.add_nonneg();
  int r = pb.add_row(3.0);
  pb.coef(r, x, 1.0);
  pb.coef(r, y, 1.0);
  pb.obj(x, 2.0);
  pb.obj(y, 1.0);
  ConicSolution sol = solve(pb.finish(), st);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(4.0).epsilon(1e-7));  // x=1, y=2
}

TEST_CASE("fixings must stay inside the integrality mask") {
  ProgramBuilder pb;
  int x = pb.add_var(0.0, 1.0);
  int y = pb.add_var(0.0, 1.0);
  pb.mark_integer(y);
  int r = pb.add_row(1.0);
  pb.coef(r, x, 1.0);
  pb.coef(r, y, 1.0);
  pb.obj(x, 1.0);
  ConicProgram p = pb.finish();
  CHECK_THROWS_AS((void)solve_with_fixings(p, {{x, 1}}), ValidationError);
  ConicSolution sol = solve_with_fixings(p, {{y, 1}});
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
}
