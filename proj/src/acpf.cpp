#include "svcplan/acpf.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "svcplan/errors.hpp"

namespace svcplan {

namespace {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct BranchAdmittance {
  Cplx yff, yft, ytf, ytt;
};

BranchAdmittance branch_admittance(const Branch& k) {
  Cplx ys = 1.0 / Cplx(k.r, k.x);
  Cplx ych(0.0, 0.5 * k.b_ch);
  Cplx tap = std::polar(k.tau, k.theta_ps);
  BranchAdmittance a;
  a.yff = (ys + ych) / std::norm(tap);
  a.yft = -ys / std::conj(tap);
  a.ytf = -ys / tap;
  a.ytt = ys + ych;
  return a;
}

}  // namespace

AcSolution newton_raphson(const NetworkCase& c, const std::vector<Load>& loads,
                          const std::map<int, double>& svc_by_bus,
                          int slack_bus_id,
                          const std::vector<double>& gen_p,
                          const std::vector<double>& v_setpoint,
                          const AcSettings& settings) {
  const int nb = static_cast<int>(c.buses.size());
  const int slack = c.bus_ordinal(slack_bus_id);
  if (slack < 0) throw ValidationError("slack bus not in case");

  CMat ybus = CMat::Zero(nb, nb);
  for (const Branch& k : c.branches) {
    int f = c.bus_ordinal(k.from_bus), t = c.bus_ordinal(k.to_bus);
    BranchAdmittance a = branch_admittance(k);
    ybus(f, f) += a.yff;
    ybus(f, t) += a.yft;
    ybus(t, f) += a.ytf;
    ybus(t, t) += a.ytt;
  }
  for (int i = 0; i < nb; ++i) ybus(i, i) += Cplx(0.0, c.buses[i].shunt_b);
  for (auto [bus, b] : svc_by_bus) {
    int o = c.bus_ordinal(bus);
    if (o < 0) throw ValidationError("svc at nonexistent bus");
    ybus(o, o) += Cplx(0.0, b);
  }

  // bus roles: generator buses hold voltage, the slack also holds angle
  std::vector<char> is_pv(nb, 0);
  Vec p_spec = Vec::Zero(nb), q_spec = Vec::Zero(nb);
  for (std::size_t g = 0; g < c.generators.size(); ++g) {
    int o = c.bus_ordinal(c.generators[g].bus);
    is_pv[o] = 1;
    p_spec[o] += g < gen_p.size() ? gen_p[g] : 0.0;
  }
  for (const Load& d : loads) {
    int o = c.bus_ordinal(d.bus);
    p_spec[o] -= d.p_base;
    q_spec[o] -= d.q_base;
  }

  Vec vm = Vec::Ones(nb), va = Vec::Zero(nb);
  for (int i = 0; i < nb; ++i)
    if ((is_pv[i] || i == slack) && i < static_cast<int>(v_setpoint.size()) &&
        v_setpoint[i] > 0.0)
      vm[i] = v_setpoint[i];

  std::vector<int> ang_idx, mag_idx;  // unknown angles / magnitudes
  for (int i = 0; i < nb; ++i) {
    if (i != slack) ang_idx.push_back(i);
    if (i != slack && !is_pv[i]) mag_idx.push_back(i);
  }
  const int na = static_cast<int>(ang_idx.size());
  const int nm = static_cast<int>(mag_idx.size());

  auto injections = [&](Vec& p, Vec& q) {
    p.setZero(nb);
    q.setZero(nb);
    for (int i = 0; i < nb; ++i) {
      for (int j = 0; j < nb; ++j) {
        Cplx y = ybus(i, j);
        if (y == Cplx(0.0, 0.0)) continue;
        double th = va[i] - va[j];
        double g = y.real(), b = y.imag();
        p[i] += vm[i] * vm[j] * (g * std::cos(th) + b * std::sin(th));
        q[i] += vm[i] * vm[j] * (g * std::sin(th) - b * std::cos(th));
      }
    }
  };

  AcSolution sol;
  Vec p(nb), q(nb);
  for (int iter = 0; iter <= settings.max_iters; ++iter) {
    injections(p, q);
    Vec mis(na + nm);
    for (int a = 0; a < na; ++a) mis[a] = p_spec[ang_idx[a]] - p[ang_idx[a]];
    for (int mI = 0; mI < nm; ++mI)
      mis[na + mI] = q_spec[mag_idx[mI]] - q[mag_idx[mI]];
    sol.final_mismatch = na + nm > 0 ? mis.lpNorm<Eigen::Infinity>() : 0.0;
    sol.iterations = iter;
    if (sol.final_mismatch <= settings.tol) {
      sol.converged = true;
      break;
    }
    if (iter == settings.max_iters) break;

    Mat jac = Mat::Zero(na + nm, na + nm);
    for (int r = 0; r < na; ++r) {
      int i = ang_idx[r];
      for (int cI = 0; cI < na; ++cI) {
        int j = ang_idx[cI];
        Cplx y = ybus(i, j);
        double g = y.real(), b = y.imag();
        if (i == j)
          jac(r, cI) = -q[i] - b * vm[i] * vm[i];
        else {
          double th = va[i] - va[j];
          jac(r, cI) = vm[i] * vm[j] * (g * std::sin(th) - b * std::cos(th));
        }
      }
      for (int cI = 0; cI < nm; ++cI) {
        int j = mag_idx[cI];
        Cplx y = ybus(i, j);
        double g = y.real(), b = y.imag();
        if (i == j)
          jac(r, na + cI) = p[i] / vm[i] + g * vm[i];
        else {
          double th = va[i] - va[j];
          jac(r, na + cI) = vm[i] * (g * std::cos(th) + b * std::sin(th));
        }
      }
    }
    for (int r = 0; r < nm; ++r) {
      int i = mag_idx[r];
      for (int cI = 0; cI < na; ++cI) {
        int j = ang_idx[cI];
        Cplx y = ybus(i, j);
        double g = y.real(), b = y.imag();
        if (i == j)
          jac(na + r, cI) = p[i] - g * vm[i] * vm[i];
        else {
          double th = va[i] - va[j];
          jac(na + r, cI) = -vm[i] * vm[j] * (g * std::cos(th) + b * std::sin(th));
        }
      }
      for (int cI = 0; cI < nm; ++cI) {
        int j = mag_idx[cI];
        Cplx y = ybus(i, j);
        double g = y.real(), b = y.imag();
        if (i == j)
          jac(na + r, na + cI) = q[i] / vm[i] - b * vm[i];
        else {
          double th = va[i] - va[j];
          jac(na + r, na + cI) = vm[i] * (g * std::sin(th) - b * std::cos(th));
        }
      }
    }
    Vec delta = jac.partialPivLu().solve(mis);
    if (!delta.allFinite()) break;
    for (int a = 0; a < na; ++a) va[ang_idx[a]] += delta[a];
    for (int mI = 0; mI < nm; ++mI) vm[mag_idx[mI]] += delta[na + mI];
  }

  sol.v_mag.assign(vm.data(), vm.data() + nb);
  sol.v_ang.assign(va.data(), va.data() + nb);
  const int nk = static_cast<int>(c.branches.size());
  sol.p_from.resize(nk);
  sol.q_from.resize(nk);
  sol.p_to.resize(nk);
  sol.q_to.resize(nk);
  sol.total_loss = 0.0;
  for (int k = 0; k < nk; ++k) {
    const Branch& br = c.branches[k];
    int f = c.bus_ordinal(br.from_bus), t = c.bus_ordinal(br.to_bus);
    BranchAdmittance a = branch_admittance(br);
    Cplx vf = std::polar(vm[f], va[f]), vt = std::polar(vm[t], va[t]);
    Cplx sf = vf * std::conj(a.yff * vf + a.yft * vt);
    Cplx st = vt * std::conj(a.ytf * vf + a.ytt * vt);
    sol.p_from[k] = sf.real();
    sol.q_from[k] = sf.imag();
    sol.p_to[k] = st.real();
    sol.q_to[k] = st.imag();
    sol.total_loss += sf.real() + st.real();
  }
  return sol;
}

ValidationReport validate(const AllocationResult& result, const MicpModel& m,
                          const NetworkCase& c, const ScenarioSet& scenarios,
                          const AcSettings& settings) {
  ValidationReport rep;
  if (result.primal.empty())
    throw ValidationError("validate: allocation has no solution vector");

  // the largest generator's bus absorbs the dispatch residual
  int slack_gen = 0;
  for (std::size_t g = 1; g < c.generators.size(); ++g)
    if (c.generators[g].p_max > c.generators[slack_gen].p_max)
      slack_gen = static_cast<int>(g);
  const int slack_bus = c.generators.empty() ? c.buses.front().id
                                             : c.generators[slack_gen].bus;

  for (int s = 0; s < static_cast<int>(scenarios.size()); ++s) {
    ScenarioValidation v;
    std::vector<Load> loads = scale_loads(c, scenarios[s]);

    std::map<int, double> svc;
    for (std::size_t ci = 0; ci < m.candidates.size(); ++ci) {
      double b = result.by_scenario[s].svc_b[ci];
      if (b != 0.0) svc[m.candidates[ci]] = b;
    }
    std::vector<double> gen_p(c.generators.size(), 0.0);
    for (std::size_t g = 0; g < c.generators.size(); ++g)
      gen_p[g] = result.primal[m.index.at(Quantity::GenP, static_cast<int>(g),
                                          s)];
    std::vector<double> vset(c.buses.size(), 0.0);
    for (int i = 0; i < static_cast<int>(c.buses.size()); ++i) {
      double w = result.primal[m.index.at(Quantity::VoltSq, i, s)];
      vset[i] = std::sqrt(std::max(w, 0.0));
    }

    AcSolution ac =
        newton_raphson(c, loads, svc, slack_bus, gen_p, vset, settings);
    v.converged = ac.converged;
    v.iterations = ac.iterations;
    v.lfb_loss_mw = result.by_scenario[s].loss_mw;
    v.cone_mismatch = cone_mismatch(m, c, result.primal, s);
    v.max_loop_residual = loop_residual(m, c, result.primal, s);
    if (ac.converged) {
      v.ac_loss_mw = ac.total_loss * c.base_mva;
      v.loss_rel_err = std::abs(v.ac_loss_mw - v.lfb_loss_mw) /
                       std::max(std::abs(v.ac_loss_mw), 1e-9);
      for (int i = 0; i < static_cast<int>(c.buses.size()); ++i)
        v.max_v_dev = std::max(
            v.max_v_dev, std::abs(ac.v_mag[i] - result.by_scenario[s].volt[i]));
      rep.max_loss_rel_err = std::max(rep.max_loss_rel_err, v.loss_rel_err);
      rep.max_v_dev = std::max(rep.max_v_dev, v.max_v_dev);
    } else {
      rep.all_converged = false;
    }
    rep.max_loop_residual = std::max(rep.max_loop_residual, v.max_loop_residual);
    rep.max_cone_mismatch = std::max(rep.max_cone_mismatch, v.cone_mismatch);
    rep.by_scenario.push_back(v);
  }
  return rep;
}

}  // namespace svcplan
