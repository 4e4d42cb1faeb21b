// Test-only dense LP oracle, independent of the interior-point path:
// two-phase simplex with Bland's rule on min c'x s.t. Ax = b, x >= 0.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace svcplan_test {

inline double simplex_oracle(Eigen::MatrixXd a, Eigen::VectorXd b,
                             Eigen::VectorXd c) {
  using Mat = Eigen::MatrixXd;
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  for (int i = 0; i < m; ++i)
    if (b[i] < 0) {
      a.row(i) *= -1.0;
      b[i] = -b[i];
    }
  const int ncols = n + m;
  Mat t = Mat::Zero(m + 1, ncols + 1);
  t.block(0, 0, m, n) = a;
  t.block(0, n, m, m) = Mat::Identity(m, m);
  t.col(ncols).head(m) = b;
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  auto pivot = [&](int pr, int pc) {
    t.row(pr) /= t(pr, pc);
    for (int r = 0; r <= m; ++r)
      if (r != pr && t(r, pc) != 0.0) t.row(r) -= t(r, pc) * t.row(pr);
    basis[pr] = pc;
  };
  auto iterate = [&](int limit_col) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < limit_col; ++j)
        if (t(m, j) < -1e-10) {
          enter = j;
          break;  // Bland: lowest index
        }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int r = 0; r < m; ++r) {
        if (t(r, enter) > 1e-12) {
          double ratio = t(r, ncols) / t(r, enter);
          if (leave < 0 || ratio < best - 1e-15 ||
              (std::abs(ratio - best) <= 1e-15 && basis[r] < basis[leave])) {
            best = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
    }
  };

  for (int j = 0; j <= ncols; ++j)
    for (int r = 0; r < m; ++r) t(m, j) -= t(r, j);
  if (!iterate(ncols)) throw std::runtime_error("oracle: phase-1 unbounded");
  if (std::abs(t(m, ncols)) > 1e-8)
    throw std::runtime_error("oracle: infeasible instance");
  for (int r = 0; r < m; ++r) {
    if (basis[r] < n) continue;
    for (int j = 0; j < n; ++j)
      if (std::abs(t(r, j)) > 1e-9) {
        pivot(r, j);
        break;
      }
  }
  t.row(m).setZero();
  for (int j = 0; j < n; ++j) t(m, j) = c[j];
  for (int r = 0; r < m; ++r)
    if (basis[r] < n) t.row(m) -= c[basis[r]] * t.row(r);
  if (!iterate(n)) throw std::runtime_error("oracle: unbounded instance");

  double obj = 0.0;
  for (int r = 0; r < m; ++r)
    if (basis[r] < n) obj += c[basis[r]] * t(r, ncols);
  return obj;
}

}  // namespace svcplan_test
