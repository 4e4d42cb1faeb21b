#include "svcplan/micp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "svcplan/errors.hpp"

namespace svcplan {

WeightScheme WeightScheme::preset(int id) {
  switch (id) {
    case 1: return {1.0, 0.0, 1e-3};
    case 2: return {1.0, 1.0, 1e-3};
    case 3: return {10.0, 1.0, 1e-3};
    case 4: return {1.0, 10.0, 1e-3};
  }
  throw ValidationError("unknown weight preset " + std::to_string(id));
}

namespace {

// Everything the per-scenario emission needs, resolved once.
struct CaseView {
  const NetworkCase& c;
  FlowIncidence inc;
  CycleBasis basis;
  std::vector<double> bus_b;        // fixed susceptance by bus ordinal
  std::vector<int> cand_ords;       // candidate bus ordinals, ascending id
  std::vector<char> is_cand;        // by bus ordinal
  std::vector<std::vector<std::pair<int, double>>> gen_at;   // unused slot
  std::vector<std::vector<int>> gens_at;   // generator ordinals by bus ordinal
  std::vector<double> load_p, load_q;      // base, by bus ordinal

  explicit CaseView(const NetworkCase& nc, const std::vector<int>& cand_ids)
      : c(nc),
        inc(build_incidence(nc)),
        basis(build_cycle_basis(nc)),
        bus_b(bus_fixed_susceptance(nc)) {
    const int nb = static_cast<int>(nc.buses.size());
    is_cand.assign(nb, 0);
    gens_at.resize(nb);
    load_p.assign(nb, 0.0);
    load_q.assign(nb, 0.0);
    for (int id : cand_ids) {
      int o = nc.bus_ordinal(id);
      if (o < 0) throw ValidationError("candidate bus not in case");
      cand_ords.push_back(o);
      is_cand[o] = 1;
    }
    for (std::size_t g = 0; g < nc.generators.size(); ++g)
      gens_at[nc.bus_ordinal(nc.generators[g].bus)].push_back(
          static_cast<int>(g));
    for (const Load& d : nc.loads) {
      int o = nc.bus_ordinal(d.bus);
      load_p[o] += d.p_base;
      load_q[o] += d.q_base;
    }
  }
};

// Adds every variable of one scenario (or the global block for s == -1) to
// the index, mirrored into the builder when present.
void layout_vars(const CaseView& v, int num_scenarios, MicpIndex& ix,
                 ProgramBuilder* b) {
  const int ng = static_cast<int>(v.c.generators.size());
  const int nk = static_cast<int>(v.c.branches.size());
  const int nb = static_cast<int>(v.c.buses.size());
  auto var = [&](Quantity q, int e, int s) {
    ix.add(q, e, s);
    if (b) b->add_var();
  };
  auto nonneg = [&](Quantity q, int e, int s) {
    ix.add(q, e, s);
    if (b) b->add_nonneg();
  };
  auto cone = [&](ConeKind kind, std::initializer_list<Quantity> members,
                  int e, int s) {
    if (b) b->add_cone(kind, static_cast<int>(members.size()));
    for (Quantity q : members) ix.add(q, e, s);
  };

  for (int s = 0; s < num_scenarios; ++s) {
    for (int g = 0; g < ng; ++g) var(Quantity::GenP, g, s);
    for (int g = 0; g < ng; ++g) var(Quantity::GenQ, g, s);
    for (int k = 0; k < nk; ++k) var(Quantity::FlowP, k, s);
    for (int k = 0; k < nk; ++k) var(Quantity::FlowQ, k, s);
    for (int k = 0; k < nk; ++k) var(Quantity::LossP, k, s);
    for (int k = 0; k < nk; ++k) var(Quantity::LossQ, k, s);
    for (int k = 0; k < nk; ++k)
      var(v.c.branches[k].r > 0.0 ? Quantity::LossAuxP : Quantity::LossAuxQ, k,
          s);
    for (int i = 0; i < nb; ++i) var(Quantity::VoltSq, i, s);
    for (int i = 0; i < nb; ++i) nonneg(Quantity::DevUp, i, s);
    for (int i = 0; i < nb; ++i) nonneg(Quantity::DevDown, i, s);
    for (int o : v.cand_ords) var(Quantity::SvcQ, o, s);
    for (int o : v.cand_ords) var(Quantity::SvcGate, o, s);
    for (int k = 0; k < nk; ++k)
      cone(ConeKind::RSoc,
           {Quantity::LossConeAux, Quantity::LossConeVolt,
            Quantity::LossConeFlowP, Quantity::LossConeFlowQ},
           k, s);
    for (int k = 0; k < nk; ++k) {
      if (v.c.branches[k].s_max <= 0.0) continue;
      cone(ConeKind::Soc,
           {Quantity::CapToLimit, Quantity::CapToP, Quantity::CapToQ}, k, s);
      cone(ConeKind::Soc,
           {Quantity::CapFromLimit, Quantity::CapFromP, Quantity::CapFromQ}, k,
           s);
    }
    for (int l = 0; l < static_cast<int>(v.basis.size()); ++l) {
      nonneg(Quantity::LoopSlackUp, l, s);
      nonneg(Quantity::LoopSlackDown, l, s);
    }
    for (int o : v.cand_ords) {
      nonneg(Quantity::SvcRangeSlackLo, o, s);
      nonneg(Quantity::SvcRangeSlackHi, o, s);
      nonneg(Quantity::GateOnSlackLo, o, s);
      nonneg(Quantity::GateOnSlackHi, o, s);
      nonneg(Quantity::GateVoltSlackLo, o, s);
      nonneg(Quantity::GateVoltSlackHi, o, s);
    }
  }
  for (int o : v.cand_ords) var(Quantity::SvcOn, o, -1);
  nonneg(Quantity::BudgetSlack, 0, -1);
}

class Assembler {
 public:
  Assembler(const NetworkCase& c, const ScenarioSet& scenarios,
            const WeightScheme& w, const SvcSpec& svc, const ModelOptions& opt)
      : case_(c),
        scenarios_(scenarios),
        weights_(w),
        svc_(svc),
        opt_(opt),
        cand_ids_(candidate_buses(c)),
        view_(c, cand_ids_) {
    if (scenarios.size() == 0) throw ValidationError("empty scenario set");
    for (const Branch& k : c.branches)
      if (k.x <= 0.0) throw ValidationError("branch with nonpositive reactance");
    layout_vars(view_, static_cast<int>(scenarios.size()), index_, &builder_);
  }

  MicpModel build() {
    assemble_objective();
    for (int s = 0; s < static_cast<int>(scenarios_.size()); ++s) {
      emit_balance(s);
      emit_voltage_drop(s);
      emit_loss_links(s);
      emit_cone_links(s);
      emit_abs_linearization(s);
      emit_loop_bands(s);
      emit_trilinear_linearization(s);
    }
    emit_budget_and_bounds();

    MicpModel m;
    m.program = builder_.finish();
    m.index = std::move(index_);
    m.rows = std::move(rows_);
    m.cones = std::move(cones_);
    m.candidates = cand_ids_;
    m.num_loops = static_cast<int>(view_.basis.size());
    m.weights = weights_;
    m.svc = svc_;
    m.options = opt_;
    if (static_cast<int>(m.rows.size()) != m.program.num_rows)
      throw ValidationError("assembly: row registry out of sync");
    return m;
  }

 private:
  int row(RowKind kind, int scenario, int entity, double rhs) {
    rows_.push_back({kind, scenario, entity});
    return builder_.add_row(rhs);
  }

  void assemble_objective() {
    const double a1 = weights_.a1, a2 = weights_.a2, al = weights_.alpha;
    for (int s = 0; s < static_cast<int>(scenarios_.size()); ++s) {
      const double rho = scenarios_[s].rho;
      for (int k = 0; k < nk(); ++k) {
        builder_.obj(index_.at(Quantity::LossP, k, s), rho * a1);
        Quantity aux = case_.branches[k].r > 0.0 ? Quantity::LossAuxP
                                                 : Quantity::LossAuxQ;
        builder_.obj(index_.at(aux, k, s), rho * al);
      }
      for (int i = 0; i < nb(); ++i) {
        builder_.obj(index_.at(Quantity::DevUp, i, s), rho * a2);
        builder_.obj(index_.at(Quantity::DevDown, i, s), rho * a2);
      }
    }
  }

  void emit_balance(int s) {
    const double lambda = scenarios_[s].lambda;
    for (int i = 0; i < nb(); ++i) {
      int rp = row(RowKind::RealBalance, s, i, lambda * view_.load_p[i]);
      for (int g : view_.gens_at[i])
        builder_.coef(rp, index_.at(Quantity::GenP, g, s), 1.0);
      for (int k = 0; k < nk(); ++k) {
        if (int mf = view_.inc.mf(i, k))
          builder_.coef(rp, index_.at(Quantity::FlowP, k, s), -mf);
        if (view_.inc.ml(i, k))
          builder_.coef(rp, index_.at(Quantity::LossP, k, s), -1.0);
      }
    }
    for (int i = 0; i < nb(); ++i) {
      int rq = row(RowKind::ReactiveBalance, s, i, lambda * view_.load_q[i]);
      for (int g : view_.gens_at[i])
        builder_.coef(rq, index_.at(Quantity::GenQ, g, s), 1.0);
      builder_.coef(rq, index_.at(Quantity::VoltSq, i, s), view_.bus_b[i]);
      if (view_.is_cand[i])
        builder_.coef(rq, index_.at(Quantity::SvcQ, i, s), 1.0);
      for (int k = 0; k < nk(); ++k) {
        if (int mf = view_.inc.mf(i, k))
          builder_.coef(rq, index_.at(Quantity::FlowQ, k, s), -mf);
        if (view_.inc.ml(i, k))
          builder_.coef(rq, index_.at(Quantity::LossQ, k, s), -1.0);
      }
    }
  }

  void emit_voltage_drop(int s) {
    for (int k = 0; k < nk(); ++k) {
      const Branch& br = case_.branches[k];
      auto [i, j] = view_.inc.ends[k];
      int r = row(RowKind::VoltageDrop, s, k, 0.0);
      builder_.coef(r, index_.at(Quantity::VoltSq, i, s),
                    1.0 / (br.tau * br.tau));
      builder_.coef(r, index_.at(Quantity::VoltSq, j, s), -1.0);
      builder_.coef(r, index_.at(Quantity::FlowP, k, s), -2.0 * br.r);
      builder_.coef(r, index_.at(Quantity::FlowQ, k, s), -2.0 * br.x);
      builder_.coef(r, index_.at(Quantity::LossP, k, s), -br.r);
      builder_.coef(r, index_.at(Quantity::LossQ, k, s), -br.x);
    }
  }

  void emit_loss_links(int s) {
    for (int k = 0; k < nk(); ++k) {
      const Branch& br = case_.branches[k];
      if (br.r > 0.0) {
        int r1 = row(RowKind::LossRatio, s, k, 0.0);
        builder_.coef(r1, index_.at(Quantity::LossP, k, s), br.x);
        builder_.coef(r1, index_.at(Quantity::LossQ, k, s), -br.r);
        int r2 = row(RowKind::LossAuxLink, s, k, 0.0);
        builder_.coef(r2, index_.at(Quantity::LossP, k, s), 1.0);
        builder_.coef(r2, index_.at(Quantity::LossAuxP, k, s), -2.0 * br.r);
      } else {
        // lossless series element: active loss vanishes, reactive loss keeps
        // its own cone through LossAuxQ
        int r1 = row(RowKind::LossRatio, s, k, 0.0);
        builder_.coef(r1, index_.at(Quantity::LossP, k, s), 1.0);
        int r2 = row(RowKind::LossAuxLink, s, k, 0.0);
        builder_.coef(r2, index_.at(Quantity::LossQ, k, s), 1.0);
        builder_.coef(r2, index_.at(Quantity::LossAuxQ, k, s), -2.0 * br.x);
      }
    }
  }

  void emit_cone_links(int s) {
    for (int k = 0; k < nk(); ++k) {
      const Branch& br = case_.branches[k];
      auto [i, j] = view_.inc.ends[k];
      Quantity aux =
          br.r > 0.0 ? Quantity::LossAuxP : Quantity::LossAuxQ;
      cones_.push_back({ConeUse::Loss, s, k, block_of(Quantity::LossConeAux, k, s)});
      link(s, k, Quantity::LossConeAux, aux, k);
      link(s, k, Quantity::LossConeVolt, Quantity::VoltSq, j);
      link(s, k, Quantity::LossConeFlowP, Quantity::FlowP, k);
      link(s, k, Quantity::LossConeFlowQ, Quantity::FlowQ, k);

      if (br.s_max <= 0.0) continue;
      const double b_to = 0.5 * br.b_ch;
      const double b_fr = 0.5 * br.b_ch / (br.tau * br.tau);
      cones_.push_back({ConeUse::CapTo, s, k, block_of(Quantity::CapToLimit, k, s)});
      int rc = row(RowKind::CapLimit, s, k, br.s_max);
      builder_.coef(rc, index_.at(Quantity::CapToLimit, k, s), 1.0);
      int rp = row(RowKind::ConeLink, s, k, 0.0);
      builder_.coef(rp, index_.at(Quantity::CapToP, k, s), 1.0);
      builder_.coef(rp, index_.at(Quantity::FlowP, k, s), -1.0);
      int rq = row(RowKind::ConeLink, s, k, 0.0);
      builder_.coef(rq, index_.at(Quantity::CapToQ, k, s), 1.0);
      builder_.coef(rq, index_.at(Quantity::FlowQ, k, s), -1.0);
      builder_.coef(rq, index_.at(Quantity::VoltSq, j, s), -b_to);

      cones_.push_back(
          {ConeUse::CapFrom, s, k, block_of(Quantity::CapFromLimit, k, s)});
      rc = row(RowKind::CapLimit, s, k, br.s_max);
      builder_.coef(rc, index_.at(Quantity::CapFromLimit, k, s), 1.0);
      rp = row(RowKind::ConeLink, s, k, 0.0);
      builder_.coef(rp, index_.at(Quantity::CapFromP, k, s), 1.0);
      builder_.coef(rp, index_.at(Quantity::FlowP, k, s), -1.0);
      builder_.coef(rp, index_.at(Quantity::LossP, k, s), -1.0);
      rq = row(RowKind::ConeLink, s, k, 0.0);
      builder_.coef(rq, index_.at(Quantity::CapFromQ, k, s), 1.0);
      builder_.coef(rq, index_.at(Quantity::FlowQ, k, s), -1.0);
      builder_.coef(rq, index_.at(Quantity::LossQ, k, s), -1.0);
      builder_.coef(rq, index_.at(Quantity::VoltSq, i, s), b_fr);
    }
  }

  void emit_abs_linearization(int s) {
    for (int i = 0; i < nb(); ++i) {
      int r = row(RowKind::AbsDeviation, s, i, 1.0);
      builder_.coef(r, index_.at(Quantity::VoltSq, i, s), 1.0);
      builder_.coef(r, index_.at(Quantity::DevUp, i, s), 1.0);
      builder_.coef(r, index_.at(Quantity::DevDown, i, s), -1.0);
    }
  }

  void emit_loop_bands(int s) {
    for (int l = 0; l < static_cast<int>(view_.basis.size()); ++l) {
      double shift = 0.0;
      for (auto [k, sign] : view_.basis.loops[l])
        shift += sign * case_.branches[k].theta_ps;
      int up = row(RowKind::LoopBandUp, s, l, opt_.eps_theta - shift);
      for (auto [k, sign] : view_.basis.loops[l]) {
        const Branch& br = case_.branches[k];
        builder_.coef(up, index_.at(Quantity::FlowP, k, s), sign * br.tau * br.x);
        builder_.coef(up, index_.at(Quantity::FlowQ, k, s), -sign * br.tau * br.r);
      }
      builder_.coef(up, index_.at(Quantity::LoopSlackUp, l, s), 1.0);
      int dn = row(RowKind::LoopBandDown, s, l, opt_.eps_theta + shift);
      for (auto [k, sign] : view_.basis.loops[l]) {
        const Branch& br = case_.branches[k];
        builder_.coef(dn, index_.at(Quantity::FlowP, k, s), -sign * br.tau * br.x);
        builder_.coef(dn, index_.at(Quantity::FlowQ, k, s), sign * br.tau * br.r);
      }
      builder_.coef(dn, index_.at(Quantity::LoopSlackDown, l, s), 1.0);
    }
  }

  void emit_trilinear_linearization(int s) {
    for (int o : view_.cand_ords) {
      const Bus& bus = case_.buses[o];
      const double lo = bus.v_min * bus.v_min, hi = bus.v_max * bus.v_max;
      int qv = index_.at(Quantity::SvcQ, o, s);
      int gate = index_.at(Quantity::SvcGate, o, s);
      int flag = index_.at(Quantity::SvcOn, o, -1);
      int w = index_.at(Quantity::VoltSq, o, s);

      int r = row(RowKind::SvcRangeLo, s, o, 0.0);
      builder_.coef(r, gate, svc_.b_min);
      builder_.coef(r, qv, -1.0);
      builder_.coef(r, index_.at(Quantity::SvcRangeSlackLo, o, s), 1.0);

      r = row(RowKind::SvcRangeHi, s, o, 0.0);
      builder_.coef(r, qv, 1.0);
      builder_.coef(r, gate, -svc_.b_max);
      builder_.coef(r, index_.at(Quantity::SvcRangeSlackHi, o, s), 1.0);

      r = row(RowKind::GateOnLo, s, o, 0.0);
      builder_.coef(r, flag, lo);
      builder_.coef(r, gate, -1.0);
      builder_.coef(r, index_.at(Quantity::GateOnSlackLo, o, s), 1.0);

      r = row(RowKind::GateOnHi, s, o, 0.0);
      builder_.coef(r, gate, 1.0);
      builder_.coef(r, flag, -hi);
      builder_.coef(r, index_.at(Quantity::GateOnSlackHi, o, s), 1.0);

      r = row(RowKind::GateVoltLo, s, o, hi);
      builder_.coef(r, w, 1.0);
      builder_.coef(r, flag, hi);
      builder_.coef(r, gate, -1.0);
      builder_.coef(r, index_.at(Quantity::GateVoltSlackLo, o, s), 1.0);

      r = row(RowKind::GateVoltHi, s, o, -lo);
      builder_.coef(r, gate, 1.0);
      builder_.coef(r, w, -1.0);
      builder_.coef(r, flag, -lo);
      builder_.coef(r, index_.at(Quantity::GateVoltSlackHi, o, s), 1.0);
    }
  }

  void emit_budget_and_bounds() {
    int r = row(RowKind::Budget, -1, 0, static_cast<double>(svc_.n_v));
    for (int o : view_.cand_ords)
      builder_.coef(r, index_.at(Quantity::SvcOn, o, -1), 1.0);
    builder_.coef(r, index_.at(Quantity::BudgetSlack, 0, -1), 1.0);

    for (int o : view_.cand_ords) {
      int flag = index_.at(Quantity::SvcOn, o, -1);
      builder_.set_bounds(flag, 0.0, 1.0);
      builder_.mark_integer(flag);
    }
    for (int s = 0; s < static_cast<int>(scenarios_.size()); ++s) {
      for (int g = 0; g < static_cast<int>(case_.generators.size()); ++g) {
        const Generator& gen = case_.generators[g];
        builder_.set_bounds(index_.at(Quantity::GenP, g, s), gen.p_min,
                            gen.p_max);
        builder_.set_bounds(index_.at(Quantity::GenQ, g, s), gen.q_min,
                            gen.q_max);
      }
      for (int i = 0; i < nb(); ++i) {
        const Bus& bus = case_.buses[i];
        builder_.set_bounds(index_.at(Quantity::VoltSq, i, s),
                            bus.v_min * bus.v_min, bus.v_max * bus.v_max);
      }
    }
  }

  void link(int s, int k, Quantity copy, Quantity orig, int orig_entity) {
    int r = row(RowKind::ConeLink, s, k, 0.0);
    builder_.coef(r, index_.at(copy, k, s), 1.0);
    builder_.coef(r, index_.at(orig, orig_entity, s), -1.0);
  }

  int block_of(Quantity head, int entity, int s) {
    // cone blocks are identified by their first member's position
    int pos = index_.at(head, entity, s);
    // builder block list is not final yet; resolved later by position
    return pos;
  }

  int nb() const { return static_cast<int>(case_.buses.size()); }
  int nk() const { return static_cast<int>(case_.branches.size()); }

  const NetworkCase& case_;
  const ScenarioSet& scenarios_;
  WeightScheme weights_;
  SvcSpec svc_;
  ModelOptions opt_;
  std::vector<int> cand_ids_;
  CaseView view_;
  MicpIndex index_;
  ProgramBuilder builder_;
  std::vector<RowInfo> rows_;
  std::vector<ConeInfo> cones_;
};

}  // namespace

MicpIndex allocate_index(const NetworkCase& c, const ScenarioSet& scenarios,
                         const std::vector<int>& candidate_ids) {
  if (scenarios.size() == 0) throw ValidationError("empty scenario set");
  CaseView view(c, candidate_ids);
  MicpIndex ix;
  layout_vars(view, static_cast<int>(scenarios.size()), ix, nullptr);
  return ix;
}

MicpModel build_micp(const NetworkCase& c, const ScenarioSet& scenarios,
                     const WeightScheme& w, const SvcSpec& svc,
                     const ModelOptions& opt) {
  if (svc.b_min > svc.b_max) throw ValidationError("svc: b_min > b_max");
  if (svc.n_v < 0) throw ValidationError("svc: negative budget");
  Assembler a(c, scenarios, w, svc, opt);
  MicpModel m = a.build();
  // resolve cone block ids from head positions
  for (ConeInfo& ci : m.cones) {
    int found = -1;
    for (std::size_t b = 0; b < m.program.blocks.size(); ++b)
      if (m.program.blocks[b].start == ci.block) {
        found = static_cast<int>(b);
        break;
      }
    if (found < 0) throw ValidationError("assembly: cone block not found");
    ci.block = found;
  }
  return m;
}

ScenarioMetrics extract_metrics(const MicpModel& m, const NetworkCase& c,
                                const std::vector<double>& primal,
                                int scenario) {
  ScenarioMetrics out;
  const int nb = static_cast<int>(c.buses.size());
  out.volt.resize(nb);
  for (int i = 0; i < nb; ++i) {
    double w = primal[m.index.at(Quantity::VoltSq, i, scenario)];
    out.volt[i] = std::sqrt(std::max(w, 0.0));
    out.dev_w += std::abs(w - 1.0);
    out.dev_v += std::abs(out.volt[i] - 1.0);
  }
  for (int k = 0; k < static_cast<int>(c.branches.size()); ++k)
    out.loss += primal[m.index.at(Quantity::LossP, k, scenario)];
  for (int id : m.candidates) {
    int o = c.bus_ordinal(id);
    double flag = primal[m.index.at(Quantity::SvcOn, o, -1)];
    double w = primal[m.index.at(Quantity::VoltSq, o, scenario)];
    double qv = primal[m.index.at(Quantity::SvcQ, o, scenario)];
    double b = flag > 0.5 && w > 0.0 ? qv / w : 0.0;
    out.svc_b.push_back(std::clamp(b, m.svc.b_min, m.svc.b_max));
  }
  return out;
}

double cone_mismatch(const MicpModel& m, const NetworkCase& c,
                     const std::vector<double>& primal, int scenario) {
  double worst = 0.0;
  for (int k = 0; k < static_cast<int>(c.branches.size()); ++k) {
    const Branch& br = c.branches[k];
    int j = c.bus_ordinal(br.to_bus);
    Quantity auxq = br.r > 0.0 ? Quantity::LossAuxP : Quantity::LossAuxQ;
    double aux = primal[m.index.at(auxq, k, scenario)];
    double w = primal[m.index.at(Quantity::VoltSq, j, scenario)];
    double p = primal[m.index.at(Quantity::FlowP, k, scenario)];
    double q = primal[m.index.at(Quantity::FlowQ, k, scenario)];
    worst = std::max(worst, 2.0 * aux * w - (p * p + q * q));
  }
  return worst;
}

double loop_residual(const MicpModel& m, const NetworkCase& c,
                     const std::vector<double>& primal, int scenario) {
  CycleBasis basis = build_cycle_basis(c);
  double worst = 0.0;
  for (const auto& loop : basis.loops) {
    double sum = 0.0;
    for (auto [k, sign] : loop) {
      const Branch& br = c.branches[k];
      double p = primal[m.index.at(Quantity::FlowP, k, scenario)];
      double q = primal[m.index.at(Quantity::FlowQ, k, scenario)];
      sum += sign * (br.tau * (p * br.x - q * br.r) + br.theta_ps);
    }
    worst = std::max(worst, std::abs(sum));
  }
  return worst;
}

std::string dump_scenario(const MicpModel& m, const NetworkCase& c,
                          int scenario) {
  static const char* row_names[] = {
      "real-balance",  "reactive-balance", "voltage-drop", "loss-ratio",
      "loss-aux-link", "cone-link",        "cap-limit",    "abs-deviation",
      "loop-band-up",  "loop-band-down",   "svc-range-lo", "svc-range-hi",
      "gate-on-lo",    "gate-on-hi",       "gate-volt-lo", "gate-volt-hi",
      "budget"};
  std::ostringstream os;
  os << "scenario " << scenario << " constraint listing\n";
  // group triplets by row (already sorted)
  std::size_t t = 0;
  for (int r = 0; r < m.program.num_rows; ++r) {
    std::size_t begin = t;
    while (t < m.program.a.size() && m.program.a[t].row == r) ++t;
    const RowInfo& info = m.rows[r];
    if (info.scenario != scenario && info.scenario != -1) continue;
    os << row_names[static_cast<int>(info.kind)] << "[" << info.entity << "]:";
    for (std::size_t u = begin; u < t; ++u) {
      double v = m.program.a[u].val;
      char buf[64];
      std::snprintf(buf, sizeof buf, " %+.6g*%s", v,
                    m.index.describe(m.program.a[u].col).c_str());
      os << buf;
    }
    char rhs[32];
    std::snprintf(rhs, sizeof rhs, " = %.6g\n", m.program.rhs[r]);
    os << rhs;
  }
  for (const ConeInfo& ci : m.cones) {
    if (ci.scenario != scenario) continue;
    const ConeBlock& b = m.program.blocks[ci.block];
    os << (ci.use == ConeUse::Loss ? "loss-cone"
           : ci.use == ConeUse::CapTo ? "cap-to-cone" : "cap-from-cone")
       << "[" << ci.entity << "]:";
    for (int i = 0; i < b.dim; ++i) os << " " << m.index.describe(b.start + i);
    os << (b.kind == ConeKind::RSoc ? " in rsoc\n" : " in soc\n");
  }
  return os.str();
}

}  // namespace svcplan
