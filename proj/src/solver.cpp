#include "svcplan/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <ostream>

#include "svcplan/errors.hpp"

namespace svcplan {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration-limit";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kSqrtHalf = 0.70710678118654752440;

// One second-order cone inside the slack vector; `rotated` blocks are
// conjugated by the orthogonal involution T mixing the first two coords.
struct SocBlock {
  bool rotated = false;
  int start = 0;  // offset within the cone rows (after the LP rows)
  int dim = 0;
};

// min c'x  s.t.  A x = b,  G x + s = h,  s in (R+^n_lp) x SOC blocks.
struct StdForm {
  int n = 0, p = 0, m = 0;
  SpMat A, G;       // scaled
  Vec b, h, c;      // scaled
  SpMat A0, G0;     // original
  Vec b0, h0, c0;
  int n_lp = 0;
  std::vector<SocBlock> blocks;
  int orig_rows = 0;  // leading equality rows that came from the program
  int deg = 0;        // barrier degree: n_lp + #blocks

  Vec col_scale, row_a, row_g;  // X = rhs_scale * col_scale .* x
  double c_scale = 1.0, rhs_scale = 1.0;
};

// rotate natural coords -> plain SOC coords (T is its own inverse)
inline void to_soc(const SocBlock& blk, Vec& v) {
  if (!blk.rotated) return;
  double a = v[0], b = v[1];
  v[0] = kSqrtHalf * (a + b);
  v[1] = kSqrtHalf * (a - b);
}

inline Vec block_of(const Vec& s, const SocBlock& blk, int n_lp) {
  return s.segment(n_lp + blk.start, blk.dim);
}

// interior violation: negative means strictly inside
inline double soc_violation(const Vec& v) {
  return v.tail(v.size() - 1).norm() - v[0];
}

double step_to_boundary_lp(const Vec& s, const Vec& ds, int n_lp) {
  double a = kInf;
  for (int i = 0; i < n_lp; ++i)
    if (ds[i] < 0.0) a = std::min(a, -s[i] / ds[i]);
  return a;
}

double step_to_boundary_soc(const Vec& sb, const Vec& db) {
  // largest step keeping sb + a*db inside the cone; sb strictly interior
  const int d = static_cast<int>(sb.size());
  double sj = sb[0] * sb[0] - sb.tail(d - 1).squaredNorm();
  double dj = db[0] * db[0] - db.tail(d - 1).squaredNorm();
  double cross = sb[0] * db[0] - sb.tail(d - 1).dot(db.tail(d - 1));
  double alpha = kInf;
  // roots of sj + 2 cross a + dj a^2 = 0, smallest positive
  double disc = cross * cross - dj * sj;
  if (disc >= 0.0) {
    double sq = std::sqrt(disc);
    for (double root : {(-cross - sq), (-cross + sq)}) {
      if (dj != 0.0) {
        double a = root / dj;
        if (a > 0.0) alpha = std::min(alpha, a);
      }
    }
    if (dj == 0.0 && cross < 0.0) alpha = std::min(alpha, -sj / (2.0 * cross));
  }
  if (db[0] < 0.0) alpha = std::min(alpha, -sb[0] / db[0]);
  return alpha;
}

struct Scaling {
  Vec lp_w2;      // s_i / z_i
  Vec lp_lambda;  // sqrt(s_i z_i)
  struct BlockScaling {
    Mat w_soc;   // NT scaling in SOC coords
    Mat w2_nat;  // W^2 in natural coords (fed to the KKT matrix)
    Vec lambda;  // scaled point, SOC coords
  };
  std::vector<BlockScaling> blocks;
};

// Jordan-algebra helpers in SOC coordinates.
inline Vec jordan_prod(const Vec& u, const Vec& v) {
  Vec r(u.size());
  r[0] = u.dot(v);
  r.tail(r.size() - 1) =
      u[0] * v.tail(v.size() - 1) + v[0] * u.tail(u.size() - 1);
  return r;
}

inline Vec jordan_solve(const Vec& lam, const Vec& d) {
  // x with lam o x = d
  const int n = static_cast<int>(lam.size());
  double det = lam[0] * lam[0] - lam.tail(n - 1).squaredNorm();
  Vec x(n);
  x[0] = (lam[0] * d[0] - lam.tail(n - 1).dot(d.tail(n - 1))) / det;
  x.tail(n - 1) = (d.tail(n - 1) - x[0] * lam.tail(n - 1)) / lam[0];
  return x;
}

bool update_scalings(const StdForm& f, const Vec& s, const Vec& z,
                     Scaling& w) {
  w.lp_w2.resize(f.n_lp);
  w.lp_lambda.resize(f.n_lp);
  for (int i = 0; i < f.n_lp; ++i) {
    if (s[i] <= 0.0 || z[i] <= 0.0) return false;
    w.lp_w2[i] = s[i] / z[i];
    w.lp_lambda[i] = std::sqrt(s[i] * z[i]);
  }
  w.blocks.resize(f.blocks.size());
  for (std::size_t ib = 0; ib < f.blocks.size(); ++ib) {
    const SocBlock& blk = f.blocks[ib];
    Vec sb = block_of(s, blk, f.n_lp);
    Vec zb = block_of(z, blk, f.n_lp);
    to_soc(blk, sb);
    to_soc(blk, zb);
    const int d = blk.dim;
    double sres = sb[0] * sb[0] - sb.tail(d - 1).squaredNorm();
    double zres = zb[0] * zb[0] - zb.tail(d - 1).squaredNorm();
    if (sres <= 0.0 || zres <= 0.0 || sb[0] <= 0.0 || zb[0] <= 0.0)
      return false;
    double snorm = std::sqrt(sres), znorm = std::sqrt(zres);
    Vec sbar = sb / snorm, zbar = zb / znorm;
    double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
    Vec wbar(d);
    wbar[0] = (sbar[0] + zbar[0]) / (2.0 * gamma);
    wbar.tail(d - 1) =
        (sbar.tail(d - 1) - zbar.tail(d - 1)) / (2.0 * gamma);
    double eta = std::sqrt(snorm / znorm);

    Mat wmat(d, d);
    wmat(0, 0) = wbar[0];
    for (int i = 1; i < d; ++i) {
      wmat(0, i) = wmat(i, 0) = wbar[i];
      for (int j = 1; j <= i; ++j)
        wmat(i, j) = wmat(j, i) =
            (i == j ? 1.0 : 0.0) + wbar[i] * wbar[j] / (1.0 + wbar[0]);
    }
    wmat *= eta;

    // W^2 = eta^2 (2 wbar wbar' - J)
    Mat w2 = 2.0 * (eta * eta) * (wbar * wbar.transpose());
    w2(0, 0) -= eta * eta;
    for (int i = 1; i < d; ++i) w2(i, i) += eta * eta;

    auto& bs = w.blocks[ib];
    bs.w_soc = wmat;
    bs.lambda = wmat * zb;
    if (blk.rotated) {
      // conjugate by T (acts on the first two rows/cols)
      Mat t = Mat::Identity(d, d);
      t(0, 0) = t(0, 1) = t(1, 0) = kSqrtHalf;
      t(1, 1) = -kSqrtHalf;
      bs.w2_nat = t * w2 * t;
    } else {
      bs.w2_nat = w2;
    }
  }
  return true;
}

// cone identity element, natural coords
Vec cone_identity(const StdForm& f) {
  Vec e = Vec::Zero(f.m);
  for (int i = 0; i < f.n_lp; ++i) e[i] = 1.0;
  for (const SocBlock& blk : f.blocks) {
    if (blk.rotated) {
      e[f.n_lp + blk.start] = kSqrtHalf;
      e[f.n_lp + blk.start + 1] = kSqrtHalf;
    } else {
      e[f.n_lp + blk.start] = 1.0;
    }
  }
  return e;
}

// shift v into the strict interior when needed: v + (1 + r) e
void bring_interior(const StdForm& f, Vec& v) {
  double r = -kInf;
  for (int i = 0; i < f.n_lp; ++i) r = std::max(r, -v[i]);
  for (const SocBlock& blk : f.blocks) {
    Vec vb = block_of(v, blk, f.n_lp);
    to_soc(blk, vb);
    r = std::max(r, soc_violation(vb));
  }
  if (f.m == 0) return;
  if (r >= 0.0) v += (1.0 + r) * cone_identity(f);
}

class HsdSolver {
 public:
  HsdSolver(StdForm form, const SolverSettings& st)
      : f_(std::move(form)), st_(st) {}

  ConicSolution run();

 private:
  void build_kkt_pattern();
  bool factorize();
  Vec kkt_solve(const Vec& rhs);
  Vec kkt_apply(const Vec& v) const;  // unregularized product
  void apply_w2(const Vec& zin, Vec& out) const;

  double step_to_boundary(const Vec& s, const Vec& ds) const;
  ConicSolution finish(SolveStatus status);

  StdForm f_;
  SolverSettings st_;
  Scaling w_;
  double reg_ = 1e-8;

  Vec x_, y_, z_, s_;
  double tau_ = 1.0, kappa_ = 1.0;
  int iters_ = 0;

  SpMat kkt_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  bool analyzed_ = false;
};

void HsdSolver::build_kkt_pattern() { /* assembled per factorize() */ }

bool HsdSolver::factorize() {
  const int n = f_.n, p = f_.p, m = f_.m;
  const int dim = n + p + m;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(4 * (f_.A.nonZeros() + f_.G.nonZeros()) + 2 * dim + 16 * f_.blocks.size());
  for (int i = 0; i < n; ++i) trips.emplace_back(i, i, reg_);
  for (int k = 0; k < f_.A.outerSize(); ++k)
    for (SpMat::InnerIterator it(f_.A, k); it; ++it) {
      trips.emplace_back(n + it.row(), it.col(), it.value());
      trips.emplace_back(it.col(), n + it.row(), it.value());
    }
  for (int r = 0; r < p; ++r) trips.emplace_back(n + r, n + r, -reg_);
  for (int k = 0; k < f_.G.outerSize(); ++k)
    for (SpMat::InnerIterator it(f_.G, k); it; ++it) {
      trips.emplace_back(n + p + it.row(), it.col(), it.value());
      trips.emplace_back(it.col(), n + p + it.row(), it.value());
    }
  for (int i = 0; i < f_.n_lp; ++i)
    trips.emplace_back(n + p + i, n + p + i, -(w_.lp_w2[i] + reg_));
  for (std::size_t ib = 0; ib < f_.blocks.size(); ++ib) {
    const SocBlock& blk = f_.blocks[ib];
    const Mat& w2 = w_.blocks[ib].w2_nat;
    for (int i = 0; i < blk.dim; ++i)
      for (int j = 0; j < blk.dim; ++j) {
        double v = -w2(i, j) - (i == j ? reg_ : 0.0);
        trips.emplace_back(n + p + f_.n_lp + blk.start + i,
                           n + p + f_.n_lp + blk.start + j, v);
      }
  }
  kkt_.resize(dim, dim);
  kkt_.setFromTriplets(trips.begin(), trips.end());
  kkt_.makeCompressed();
  if (!analyzed_) {
    ldlt_.analyzePattern(kkt_);
    analyzed_ = true;
  }
  ldlt_.factorize(kkt_);
  return ldlt_.info() == Eigen::Success;
}

void HsdSolver::apply_w2(const Vec& zin, Vec& out) const {
  for (int i = 0; i < f_.n_lp; ++i) out[i] = w_.lp_w2[i] * zin[i];
  for (std::size_t ib = 0; ib < f_.blocks.size(); ++ib) {
    const SocBlock& blk = f_.blocks[ib];
    out.segment(f_.n_lp + blk.start, blk.dim) =
        w_.blocks[ib].w2_nat *
        zin.segment(f_.n_lp + blk.start, blk.dim);
  }
}

Vec HsdSolver::kkt_apply(const Vec& v) const {
  const int n = f_.n, p = f_.p, m = f_.m;
  Vec out(n + p + m);
  Vec v1 = v.head(n), v2 = v.segment(n, p), v3 = v.tail(m);
  out.head(n) = f_.A.transpose() * v2 + f_.G.transpose() * v3;
  out.segment(n, p) = f_.A * v1;
  Vec w2v3(m);
  apply_w2(v3, w2v3);
  out.tail(m) = f_.G * v1 - w2v3;
  return out;
}

Vec HsdSolver::kkt_solve(const Vec& rhs) {
  Vec x = ldlt_.solve(rhs);
  for (int it = 0; it < st_.refine_steps; ++it) {
    Vec r = rhs - kkt_apply(x);
    x += ldlt_.solve(r);
  }
  return x;
}

double HsdSolver::step_to_boundary(const Vec& v, const Vec& dv) const {
  double a = step_to_boundary_lp(v, dv, f_.n_lp);
  for (const SocBlock& blk : f_.blocks) {
    Vec vb = block_of(v, blk, f_.n_lp);
    Vec db = block_of(dv, blk, f_.n_lp);
    to_soc(blk, vb);
    to_soc(blk, db);
    a = std::min(a, step_to_boundary_soc(vb, db));
  }
  return a;
}

ConicSolution HsdSolver::finish(SolveStatus status) {
  ConicSolution sol;
  sol.status = status;
  sol.iterations = iters_;
  const double t = tau_ > 0.0 ? tau_ : 1.0;
  Vec xo = (f_.rhs_scale / t) * f_.col_scale.cwiseProduct(x_);
  Vec yo = (f_.c_scale / t) * f_.row_a.cwiseProduct(y_);
  Vec zo = (f_.c_scale / t) * f_.row_g.cwiseProduct(z_);
  sol.primal.assign(xo.data(), xo.data() + xo.size());
  sol.dual_eq.assign(yo.data(), yo.data() + std::min<int>(f_.orig_rows, yo.size()));
  sol.dual_cone.assign(zo.data(), zo.data() + zo.size());
  sol.objective = f_.c0.dot(xo);

  Vec so = Vec::Zero(f_.m);
  for (int i = 0; i < f_.m; ++i) so[i] = s_[i] / f_.row_g[i];
  so *= f_.rhs_scale / t;
  double pres = 0.0;
  if (f_.p > 0) pres = (f_.A0 * xo - f_.b0).lpNorm<Eigen::Infinity>() /
                       (1.0 + f_.b0.lpNorm<Eigen::Infinity>());
  if (f_.m > 0)
    pres = std::max(pres, (f_.G0 * xo + so - f_.h0).lpNorm<Eigen::Infinity>() /
                              (1.0 + f_.h0.lpNorm<Eigen::Infinity>()));
  Vec dres_v = f_.c0;
  if (f_.p > 0) dres_v += f_.A0.transpose() * yo;
  if (f_.m > 0) dres_v += f_.G0.transpose() * zo;
  sol.residuals.primal = pres;
  sol.residuals.dual = dres_v.lpNorm<Eigen::Infinity>() /
                       (1.0 + f_.c0.lpNorm<Eigen::Infinity>());
  double pobj = sol.objective;
  double dobj = -(f_.p > 0 ? f_.b0.dot(yo) : 0.0) -
                (f_.m > 0 ? f_.h0.dot(zo) : 0.0);
  sol.residuals.rel_gap =
      std::abs(pobj - dobj) / std::max(1.0, std::abs(pobj));
  return sol;
}

ConicSolution HsdSolver::run() {
  const int n = f_.n, p = f_.p, m = f_.m;

  // initial point: W = I solves against primal and dual right-hand sides
  w_.lp_w2 = Vec::Ones(f_.n_lp);
  w_.lp_lambda = Vec::Ones(f_.n_lp);
  w_.blocks.assign(f_.blocks.size(), {});
  for (std::size_t ib = 0; ib < f_.blocks.size(); ++ib) {
    w_.blocks[ib].w2_nat = Mat::Identity(f_.blocks[ib].dim, f_.blocks[ib].dim);
  }
  if (!factorize()) {
    for (int tries = 0; tries < 4 && !factorize(); ++tries) reg_ *= 100.0;
  }

  Vec rhs1(n + p + m);
  rhs1.setZero();
  rhs1.segment(n, p) = f_.b;
  rhs1.tail(m) = f_.h;
  Vec v = kkt_solve(rhs1);
  x_ = v.head(n);
  s_ = -v.tail(m);
  bring_interior(f_, s_);

  Vec rhs2(n + p + m);
  rhs2.setZero();
  rhs2.head(n) = -f_.c;
  v = kkt_solve(rhs2);
  y_ = v.segment(n, p);
  z_ = v.tail(m);
  bring_interior(f_, z_);
  tau_ = 1.0;
  kappa_ = 1.0;

  if (st_.iter_log)
    *st_.iter_log << "iter,mu,primal_res,dual_res,rel_gap,step\n";

  double last_step = 0.0;
  SolveStatus status = SolveStatus::IterationLimit;
  ConicSolution best;
  double best_score = kInf;
  int stalled = 0;
  for (iters_ = 0; iters_ < st_.max_iters; ++iters_) {
    // residuals of the embedding (scaled data)
    Vec hrx = f_.c * tau_;
    if (p > 0) hrx += f_.A.transpose() * y_;
    if (m > 0) hrx += f_.G.transpose() * z_;
    Vec hry = f_.A * x_ - f_.b * tau_;
    Vec hrz = s_ + f_.G * x_ - f_.h * tau_;
    double hrt = kappa_ + f_.c.dot(x_) + f_.b.dot(y_) + f_.h.dot(z_);
    double mu = (s_.dot(z_) + tau_ * kappa_) / (f_.deg + 1);

    // honest convergence checks on the original data
    {
      ConicSolution probe = finish(SolveStatus::Optimal);
      bool feas = probe.residuals.primal <= st_.feas_tol &&
                  probe.residuals.dual <= st_.feas_tol;
      double sz_gap = s_.dot(z_) / (tau_ * tau_);
      double pobj = probe.objective;
      bool gap_ok = probe.residuals.rel_gap <= st_.gap_tol ||
                    sz_gap <= st_.gap_tol * std::max(1.0, std::abs(pobj));
      double score = std::max({probe.residuals.primal, probe.residuals.dual,
                               probe.residuals.rel_gap});
      if (score < 0.9 * best_score) {
        best_score = score;
        best = probe;
        best.iterations = iters_;
        stalled = 0;
      } else if (++stalled >= 8 && best_score < 1e-5) {
        break;  // endgame stall: fall back to the best iterate seen
      }
      if (st_.iter_log) {
        *st_.iter_log << iters_ << "," << mu << "," << probe.residuals.primal
                      << "," << probe.residuals.dual << ","
                      << probe.residuals.rel_gap << "," << last_step << "\n";
      }
      if (st_.check_duality && probe.residuals.primal <= 1e-4 &&
          probe.residuals.dual <= 1e-4) {
        double dobj = pobj - probe.residuals.rel_gap *
                                 std::max(1.0, std::abs(pobj));
        if (pobj < dobj - 1e-6 * std::max(1.0, std::abs(pobj)))
          throw SolveError("weak duality violated on iterate");
      }
      if (feas && gap_ok) {
        status = SolveStatus::Optimal;
        break;
      }

      // infeasibility / unboundedness certificates
      if (tau_ <= 1e-6 * std::max(1.0, kappa_) || mu <= 1e-12) {
        Vec yo = f_.c_scale * f_.row_a.cwiseProduct(y_);
        Vec zo = f_.c_scale * f_.row_g.cwiseProduct(z_);
        double qp = -(f_.b0.dot(yo) + f_.h0.dot(zo));
        if (qp > 0.0) {
          Vec r = Vec::Zero(n);
          if (p > 0) r += f_.A0.transpose() * yo;
          if (m > 0) r += f_.G0.transpose() * zo;
          if (r.lpNorm<Eigen::Infinity>() <= 1e-7 * qp * 100.0) {
            status = SolveStatus::Infeasible;
            break;
          }
        }
        Vec xo = f_.rhs_scale * f_.col_scale.cwiseProduct(x_);
        double qd = -f_.c0.dot(xo);
        if (qd > 0.0) {
          Vec so = Vec::Zero(m);
          for (int i = 0; i < m; ++i) so[i] = s_[i] / f_.row_g[i];
          so *= f_.rhs_scale;
          double r = 0.0;
          if (p > 0) r = (f_.A0 * xo).lpNorm<Eigen::Infinity>();
          if (m > 0)
            r = std::max(r, (f_.G0 * xo + so).lpNorm<Eigen::Infinity>());
          if (r <= 1e-7 * qd * 100.0) {
            status = SolveStatus::Unbounded;
            break;
          }
        }
        if (mu <= 1e-14) {
          status = SolveStatus::NumericalFailure;
          break;
        }
      }
    }

    if (!update_scalings(f_, s_, z_, w_)) {
      status = SolveStatus::NumericalFailure;
      break;
    }
    bool ok = factorize();
    for (int tries = 0; !ok && tries < 3; ++tries) {
      reg_ *= 100.0;
      ok = factorize();
    }
    if (!ok) {
      status = SolveStatus::NumericalFailure;
      break;
    }

    // common solve against [-c; b; h]
    Vec rhs_static(n + p + m);
    rhs_static.head(n) = -f_.c;
    rhs_static.segment(n, p) = f_.b;
    rhs_static.tail(m) = f_.h;
    Vec v1 = kkt_solve(rhs_static);
    double q1 = f_.c.dot(v1.head(n)) + f_.b.dot(v1.segment(n, p)) +
                f_.h.dot(v1.tail(m));

    auto direction = [&](double gamma, const Vec& ds_rhs, double dk_rhs,
                         Vec& dx, Vec& dy, Vec& dz, Vec& ds, double& dtau,
                         double& dkappa) {
      // ds_rhs per cone in SOC coords; W(lambda \ ds_rhs) in natural coords
      Vec wls = Vec::Zero(m);
      for (int i = 0; i < f_.n_lp; ++i) {
        double sol = ds_rhs[i] / w_.lp_lambda[i];
        wls[i] = std::sqrt(w_.lp_w2[i]) * sol;
      }
      for (std::size_t ib = 0; ib < f_.blocks.size(); ++ib) {
        const SocBlock& blk = f_.blocks[ib];
        Vec d = ds_rhs.segment(f_.n_lp + blk.start, blk.dim);
        Vec sol = jordan_solve(w_.blocks[ib].lambda, d);
        Vec nat = w_.blocks[ib].w_soc * sol;
        to_soc(blk, nat);  // rotate back (T is an involution)
        wls.segment(f_.n_lp + blk.start, blk.dim) = nat;
      }

      Vec rhs(n + p + m);
      rhs.head(n) = -(1.0 - gamma) * hrx;
      rhs.segment(n, p) = -(1.0 - gamma) * hry;
      rhs.tail(m) = -(1.0 - gamma) * hrz - wls;
      Vec v2 = kkt_solve(rhs);
      double q2 = f_.c.dot(v2.head(n)) + f_.b.dot(v2.segment(n, p)) +
                  f_.h.dot(v2.tail(m));

      dtau = (-(1.0 - gamma) * hrt - q2 - dk_rhs / tau_) / (q1 - kappa_ / tau_);
      dx = v2.head(n) + dtau * v1.head(n);
      dy = v2.segment(n, p) + dtau * v1.segment(n, p);
      dz = v2.tail(m) + dtau * v1.tail(m);
      Vec w2dz(m);
      apply_w2(dz, w2dz);
      ds = wls - w2dz;
      dkappa = (dk_rhs - kappa_ * dtau) / tau_;
    };

    // affine predictor
    Vec ds_aff_rhs(m);
    for (int i = 0; i < f_.n_lp; ++i)
      ds_aff_rhs[i] = -w_.lp_lambda[i] * w_.lp_lambda[i];
    for (std::size_t ib = 0; ib < f_.blocks.size(); ++ib) {
      const SocBlock& blk = f_.blocks[ib];
      ds_aff_rhs.segment(f_.n_lp + blk.start, blk.dim) =
          -jordan_prod(w_.blocks[ib].lambda, w_.blocks[ib].lambda);
    }
    Vec dx_a, dy_a, dz_a, ds_a;
    double dtau_a, dkappa_a;
    direction(0.0, ds_aff_rhs, -tau_ * kappa_, dx_a, dy_a, dz_a, ds_a, dtau_a,
              dkappa_a);

    double alpha_aff = std::min(step_to_boundary(s_, ds_a),
                                step_to_boundary(z_, dz_a));
    if (dtau_a < 0.0) alpha_aff = std::min(alpha_aff, -tau_ / dtau_a);
    if (dkappa_a < 0.0) alpha_aff = std::min(alpha_aff, -kappa_ / dkappa_a);
    alpha_aff = std::min(alpha_aff, 1.0);
    double sigma = std::pow(1.0 - alpha_aff, 3);
    sigma = std::clamp(sigma, 1e-8, 1.0 - 1e-8);

    // combined corrector
    Vec ds_rhs(m);
    for (int i = 0; i < f_.n_lp; ++i) {
      double wi = std::sqrt(w_.lp_w2[i]);
      double corr = (ds_a[i] / wi) * (wi * dz_a[i]);
      ds_rhs[i] = sigma * mu - w_.lp_lambda[i] * w_.lp_lambda[i] - corr;
    }
    for (std::size_t ib = 0; ib < f_.blocks.size(); ++ib) {
      const SocBlock& blk = f_.blocks[ib];
      Vec dsb = ds_a.segment(f_.n_lp + blk.start, blk.dim);
      Vec dzb = dz_a.segment(f_.n_lp + blk.start, blk.dim);
      to_soc(blk, dsb);
      to_soc(blk, dzb);
      const auto& bs = w_.blocks[ib];
      Vec u = bs.w_soc.ldlt().solve(dsb);  // W^{-1} ds (symmetric W)
      Vec vv = bs.w_soc * dzb;
      Vec corr = jordan_prod(u, vv);
      Vec lam2 = jordan_prod(bs.lambda, bs.lambda);
      Vec rhs_b = -lam2 - corr;
      rhs_b[0] += sigma * mu;
      ds_rhs.segment(f_.n_lp + blk.start, blk.dim) = rhs_b;
    }
    double dk_rhs = sigma * mu - tau_ * kappa_ - dtau_a * dkappa_a;

    Vec dx, dy, dz, ds;
    double dtau, dkappa;
    direction(sigma, ds_rhs, dk_rhs, dx, dy, dz, ds, dtau, dkappa);

    double alpha = std::min(step_to_boundary(s_, ds),
                            step_to_boundary(z_, dz));
    if (dtau < 0.0) alpha = std::min(alpha, -tau_ / dtau);
    if (dkappa < 0.0) alpha = std::min(alpha, -kappa_ / dkappa);
    alpha = std::min(st_.step_fraction * alpha, 1.0);
    last_step = alpha;

    x_ += alpha * dx;
    y_ += alpha * dy;
    z_ += alpha * dz;
    s_ += alpha * ds;
    tau_ += alpha * dtau;
    kappa_ += alpha * dkappa;

    if (!(tau_ > 0.0) || !(kappa_ >= 0.0) || !std::isfinite(mu)) {
      status = SolveStatus::NumericalFailure;
      break;
    }
  }

  if (status == SolveStatus::Optimal || status == SolveStatus::Infeasible ||
      status == SolveStatus::Unbounded)
    return finish(status);

  // fall back to the best iterate seen; report honestly
  ConicSolution out = finish(status);
  double cur_score = std::max(
      {out.residuals.primal, out.residuals.dual, out.residuals.rel_gap});
  if (best_score < cur_score && !best.primal.empty()) out = best;
  // a stalled endgame still carries its best iterate and true residuals
  out.status = best_score < 1e-4 ? SolveStatus::IterationLimit : status;
  out.iterations = iters_;
  if (out.residuals.primal <= st_.feas_tol &&
      out.residuals.dual <= st_.feas_tol &&
      out.residuals.rel_gap <= st_.gap_tol)
    out.status = SolveStatus::Optimal;
  return out;
}

// ---- transformation from the block/bounds program to the (A, G) form ----

StdForm transform(const ConicProgram& prog, const std::map<int, int>* fixings) {
  prog.validate();
  const int n = prog.num_vars;

  std::vector<double> lo = prog.lo, hi = prog.hi;
  if (fixings) {
    for (auto [pos, val] : *fixings) {
      if (pos < 0 || pos >= n || !prog.integer_mask[pos])
        throw ValidationError(
            "fixing position outside the integrality mask");
      if (val != 0 && val != 1)
        throw ValidationError("fixing value must be 0 or 1");
      lo[pos] = hi[pos] = static_cast<double>(val);
    }
  }

  StdForm f;
  f.n = n;
  f.orig_rows = prog.num_rows;

  std::vector<Eigen::Triplet<double>> at, gt;
  std::vector<double> bvec, hvec;
  for (const Triplet& t : prog.a) at.emplace_back(t.row, t.col, t.val);
  for (int r = 0; r < prog.num_rows; ++r) bvec.push_back(prog.rhs[r]);
  for (int i = 0; i < n; ++i) {
    if (lo[i] == hi[i]) {
      at.emplace_back(static_cast<int>(bvec.size()), i, 1.0);
      bvec.push_back(lo[i]);
    }
  }

  // LP rows: nonneg tags first, then finite bounds
  for (const ConeBlock& blk : prog.blocks) {
    if (blk.kind != ConeKind::Nonneg) continue;
    for (int i = blk.start; i < blk.start + blk.dim; ++i) {
      gt.emplace_back(static_cast<int>(hvec.size()), i, -1.0);
      hvec.push_back(0.0);
    }
  }
  for (const ConeBlock& blk : prog.blocks) {
    if (blk.kind != ConeKind::Free && blk.kind != ConeKind::Nonneg) continue;
    for (int i = blk.start; i < blk.start + blk.dim; ++i) {
      if (lo[i] == hi[i]) continue;  // handled as equality
      bool tagged_nonneg = blk.kind == ConeKind::Nonneg;
      if (lo[i] != -kInf && !(tagged_nonneg && lo[i] <= 0.0)) {
        gt.emplace_back(static_cast<int>(hvec.size()), i, -1.0);
        hvec.push_back(-lo[i]);
      }
      if (hi[i] != kInf) {
        gt.emplace_back(static_cast<int>(hvec.size()), i, 1.0);
        hvec.push_back(hi[i]);
      }
    }
  }
  f.n_lp = static_cast<int>(hvec.size());
  for (const ConeBlock& blk : prog.blocks) {
    if (blk.kind != ConeKind::Soc && blk.kind != ConeKind::RSoc) continue;
    SocBlock sb;
    sb.rotated = blk.kind == ConeKind::RSoc;
    sb.start = static_cast<int>(hvec.size()) - f.n_lp;
    sb.dim = blk.dim;
    for (int i = 0; i < blk.dim; ++i) {
      gt.emplace_back(static_cast<int>(hvec.size()), blk.start + i, -1.0);
      hvec.push_back(0.0);
    }
    f.blocks.push_back(sb);
  }
  f.p = static_cast<int>(bvec.size());
  f.m = static_cast<int>(hvec.size());
  f.deg = f.n_lp + static_cast<int>(f.blocks.size());

  f.A0.resize(f.p, n);
  f.A0.setFromTriplets(at.begin(), at.end());
  f.G0.resize(f.m, n);
  f.G0.setFromTriplets(gt.begin(), gt.end());
  f.b0 = Eigen::Map<Vec>(bvec.data(), f.p);
  f.h0 = Eigen::Map<Vec>(hvec.data(), f.m);
  f.c0 = Eigen::Map<const Vec>(prog.objective.data(), n);

  // Ruiz equilibration; cone-block rows share a uniform factor
  f.col_scale = Vec::Ones(n);
  f.row_a = Vec::Ones(f.p);
  f.row_g = Vec::Ones(f.m);
  f.A = f.A0;
  f.G = f.G0;
  for (int pass = 0; pass < 3; ++pass) {
    Vec ra = Vec::Zero(f.p), rg = Vec::Zero(f.m), cs = Vec::Zero(n);
    for (int k = 0; k < f.A.outerSize(); ++k)
      for (SpMat::InnerIterator it(f.A, k); it; ++it) {
        double a = std::abs(it.value());
        ra[it.row()] = std::max(ra[it.row()], a);
        cs[it.col()] = std::max(cs[it.col()], a);
      }
    for (int k = 0; k < f.G.outerSize(); ++k)
      for (SpMat::InnerIterator it(f.G, k); it; ++it) {
        double a = std::abs(it.value());
        rg[it.row()] = std::max(rg[it.row()], a);
        cs[it.col()] = std::max(cs[it.col()], a);
      }
    for (const SocBlock& blk : f.blocks) {
      double mx = 0.0;
      for (int i = 0; i < blk.dim; ++i)
        mx = std::max(mx, rg[f.n_lp + blk.start + i]);
      for (int i = 0; i < blk.dim; ++i) rg[f.n_lp + blk.start + i] = mx;
    }
    auto factor = [](double v) { return v > 1e-10 ? 1.0 / std::sqrt(v) : 1.0; };
    Vec fa = ra.unaryExpr(factor), fg = rg.unaryExpr(factor),
        fc = cs.unaryExpr(factor);
    for (int k = 0; k < f.A.outerSize(); ++k)
      for (SpMat::InnerIterator it(f.A, k); it; ++it)
        it.valueRef() *= fa[it.row()] * fc[it.col()];
    for (int k = 0; k < f.G.outerSize(); ++k)
      for (SpMat::InnerIterator it(f.G, k); it; ++it)
        it.valueRef() *= fg[it.row()] * fc[it.col()];
    f.row_a = f.row_a.cwiseProduct(fa);
    f.row_g = f.row_g.cwiseProduct(fg);
    f.col_scale = f.col_scale.cwiseProduct(fc);
  }
  Vec ec = f.col_scale.cwiseProduct(f.c0);
  f.c_scale = std::max(1.0, ec.lpNorm<Eigen::Infinity>());
  f.c = ec / f.c_scale;
  Vec bs = f.row_a.cwiseProduct(f.b0);
  Vec hs = f.row_g.cwiseProduct(f.h0);
  double rn = std::max(f.p > 0 ? bs.lpNorm<Eigen::Infinity>() : 0.0,
                       f.m > 0 ? hs.lpNorm<Eigen::Infinity>() : 0.0);
  f.rhs_scale = std::max(1.0, rn);
  f.b = bs / f.rhs_scale;
  f.h = hs / f.rhs_scale;
  return f;
}

}  // namespace

ConicSolution solve(const ConicProgram& p, const SolverSettings& s) {
  StdForm f = transform(p, nullptr);
  HsdSolver solver(std::move(f), s);
  return solver.run();
}

ConicSolution solve_with_fixings(const ConicProgram& p,
                                 const std::map<int, int>& fixings,
                                 const SolverSettings& s) {
  StdForm f = transform(p, &fixings);
  HsdSolver solver(std::move(f), s);
  return solver.run();
}

}  // namespace svcplan
