#include "svcplan.h"

#include <cstring>
#include <string>

#include "svcplan/errors.hpp"
#include "svcplan/planner.hpp"

using namespace svcplan;

struct svcplan_case {
  NetworkCase net;
};
struct svcplan_scenarios {
  ScenarioSet set;
};
struct svcplan_report {
  RunReport report;
};

namespace {

thread_local std::string g_last_error;

svcplan_status fail(svcplan_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <class F>
svcplan_status guarded(F&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    return fail(SVCPLAN_ERR_PARSE, e.what());
  } catch (const ValidationError& e) {
    return fail(SVCPLAN_ERR_INVALID, e.what());
  } catch (const SolveError& e) {
    return fail(SVCPLAN_ERR_SOLVE, e.what());
  } catch (const std::exception& e) {
    return fail(SVCPLAN_ERR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* svcplan_version(void) { return "1.0.0"; }

const char* svcplan_status_name(svcplan_status s) {
  switch (s) {
    case SVCPLAN_OK: return "ok";
    case SVCPLAN_ERR_ARGUMENT: return "argument";
    case SVCPLAN_ERR_IO: return "io";
    case SVCPLAN_ERR_PARSE: return "parse";
    case SVCPLAN_ERR_INVALID: return "invalid";
    case SVCPLAN_ERR_SOLVE: return "solve";
    case SVCPLAN_ERR_INTERNAL: return "internal";
  }
  return "?";
}

const char* svcplan_last_error(void) { return g_last_error.c_str(); }

svcplan_status svcplan_case_load(const char* path, svcplan_case** out) {
  if (!path || !out) return fail(SVCPLAN_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto* c = new svcplan_case{load_case(path)};
    *out = c;
    return SVCPLAN_OK;
  });
}

svcplan_status svcplan_case_parse(const char* text, svcplan_case** out) {
  if (!text || !out) return fail(SVCPLAN_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto* c = new svcplan_case{parse_case(text)};
    *out = c;
    return SVCPLAN_OK;
  });
}

void svcplan_case_free(svcplan_case* c) { delete c; }

int svcplan_case_bus_count(const svcplan_case* c) {
  return c ? static_cast<int>(c->net.buses.size()) : 0;
}
int svcplan_case_branch_count(const svcplan_case* c) {
  return c ? static_cast<int>(c->net.branches.size()) : 0;
}
int svcplan_case_generator_count(const svcplan_case* c) {
  return c ? static_cast<int>(c->net.generators.size()) : 0;
}
double svcplan_case_base_mva(const svcplan_case* c) {
  return c ? c->net.base_mva : 0.0;
}
double svcplan_case_load_mw(const svcplan_case* c) {
  return c ? c->net.total_load_p() * c->net.base_mva : 0.0;
}
double svcplan_case_load_mvar(const svcplan_case* c) {
  return c ? c->net.total_load_q() * c->net.base_mva : 0.0;
}

svcplan_status svcplan_case_candidates(const svcplan_case* c, int* buses,
                                       size_t cap, size_t* count) {
  if (!c || !count) return fail(SVCPLAN_ERR_ARGUMENT, "null argument");
  std::vector<int> ids = candidate_buses(c->net);
  *count = ids.size();
  if (!buses) return SVCPLAN_OK;
  if (cap < ids.size())
    return fail(SVCPLAN_ERR_ARGUMENT, "candidate buffer too small");
  std::memcpy(buses, ids.data(), ids.size() * sizeof(int));
  return SVCPLAN_OK;
}

svcplan_status svcplan_scenarios_load(const char* path,
                                      svcplan_scenarios** out) {
  if (!path || !out) return fail(SVCPLAN_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new svcplan_scenarios{load_scenarios(path)};
    return SVCPLAN_OK;
  });
}

svcplan_status svcplan_scenarios_builtin(svcplan_scenarios** out) {
  if (!out) return fail(SVCPLAN_ERR_ARGUMENT, "null argument");
  *out = new svcplan_scenarios{builtin_scenarios()};
  return SVCPLAN_OK;
}

svcplan_status svcplan_scenarios_single(svcplan_scenarios** out) {
  if (!out) return fail(SVCPLAN_ERR_ARGUMENT, "null argument");
  *out = new svcplan_scenarios{build_scenarios({{1.0, 1.0}})};
  return SVCPLAN_OK;
}

void svcplan_scenarios_free(svcplan_scenarios* s) { delete s; }

int svcplan_scenarios_count(const svcplan_scenarios* s) {
  return s ? static_cast<int>(s->set.size()) : 0;
}

svcplan_status svcplan_scenarios_row(const svcplan_scenarios* s, int row,
                                     double* rho, double* lambda) {
  if (!s || row < 0 || row >= static_cast<int>(s->set.size()))
    return fail(SVCPLAN_ERR_ARGUMENT, "scenario row out of range");
  if (rho) *rho = s->set[row].rho;
  if (lambda) *lambda = s->set[row].lambda;
  return SVCPLAN_OK;
}

void svcplan_run_options_init(svcplan_run_options* o) {
  if (!o) return;
  std::memset(o, 0, sizeof *o);
  o->a1[0] = 1.0;
  o->a2[0] = 0.0;
  o->weight_case_count = 1;
  o->nv[0] = 1;
  o->nv_count = 1;
  o->svc_b_min = 0.0;
  o->svc_b_max = 0.3;
  o->alpha = 1e-3;
  o->eps_theta = 0.00872664625997164788;
  o->validate_ac = 1;
  o->workers = 1;
  o->log_dir = nullptr;
}

svcplan_status svcplan_run(const svcplan_case* c, const svcplan_scenarios* s,
                           const svcplan_run_options* o,
                           svcplan_report** out) {
  if (!c || !s || !o || !out) return fail(SVCPLAN_ERR_ARGUMENT, "null argument");
  if (o->weight_case_count < 1 ||
      o->weight_case_count > SVCPLAN_MAX_WEIGHT_CASES)
    return fail(SVCPLAN_ERR_ARGUMENT, "weight_case_count out of range");
  if (o->nv_count < 0 || o->nv_count > SVCPLAN_MAX_NV)
    return fail(SVCPLAN_ERR_ARGUMENT, "nv_count out of range");
  return guarded([&] {
    RunConfig cfg;
    cfg.network = c->net;
    cfg.scenarios = s->set;
    for (int i = 0; i < o->weight_case_count; ++i)
      cfg.weight_cases.push_back({o->a1[i], o->a2[i], o->alpha});
    cfg.nv_values.assign(o->nv, o->nv + o->nv_count);
    cfg.svc_b_min = o->svc_b_min;
    cfg.svc_b_max = o->svc_b_max;
    cfg.alpha = o->alpha;
    cfg.eps_theta = o->eps_theta;
    cfg.validate_ac = o->validate_ac != 0;
    cfg.workers = o->workers > 0 ? o->workers : 1;
    if (o->log_dir) cfg.log_dir = o->log_dir;
    *out = new svcplan_report{run(cfg)};
    return SVCPLAN_OK;
  });
}

void svcplan_report_free(svcplan_report* r) { delete r; }

int svcplan_report_all_ok(const svcplan_report* r) {
  return r && r->report.all_ok ? 1 : 0;
}

int svcplan_report_cell_count(const svcplan_report* r) {
  return r ? static_cast<int>(r->report.cells.size()) : 0;
}

static const RunCell* cell_at(const svcplan_report* r, int cell) {
  if (!r || cell < 0 || cell >= static_cast<int>(r->report.cells.size()))
    return nullptr;
  return &r->report.cells[cell];
}

svcplan_status svcplan_report_cell_info(const svcplan_report* r, int cell,
                                        int* weight_case, int* nv,
                                        int* is_baseline, int* ok) {
  const RunCell* c = cell_at(r, cell);
  if (!c) return fail(SVCPLAN_ERR_ARGUMENT, "cell out of range");
  if (weight_case) *weight_case = c->weight_case + 1;
  if (nv) *nv = c->nv < 0 ? 0 : c->nv;
  if (is_baseline) *is_baseline = c->nv < 0 ? 1 : 0;
  if (ok) *ok = c->ok ? 1 : 0;
  return SVCPLAN_OK;
}

svcplan_status svcplan_report_cell_metrics(const svcplan_report* r, int cell,
                                           double* loss_mw, double* dev_w_pu,
                                           double* dev_v_pu, double* objective,
                                           double* bound_gap,
                                           double* max_cone_mismatch,
                                           double* wall_seconds, int* nodes) {
  const RunCell* c = cell_at(r, cell);
  if (!c) return fail(SVCPLAN_ERR_ARGUMENT, "cell out of range");
  if (!c->ok) return fail(SVCPLAN_ERR_SOLVE, c->error);
  const AllocationResult& a = c->allocation;
  if (loss_mw) *loss_mw = a.weighted_loss_mw;
  if (dev_w_pu) *dev_w_pu = a.weighted_dev_w;
  if (dev_v_pu) *dev_v_pu = a.weighted_dev_v;
  if (objective) *objective = a.objective;
  if (bound_gap) *bound_gap = a.bound_gap;
  if (max_cone_mismatch) *max_cone_mismatch = a.max_cone_mismatch;
  if (wall_seconds) *wall_seconds = a.wall_seconds;
  if (nodes) *nodes = a.nodes;
  return SVCPLAN_OK;
}

svcplan_status svcplan_report_cell_locations(const svcplan_report* r, int cell,
                                             int* buses, size_t cap,
                                             size_t* count) {
  const RunCell* c = cell_at(r, cell);
  if (!c || !count) return fail(SVCPLAN_ERR_ARGUMENT, "cell out of range");
  if (!c->ok) return fail(SVCPLAN_ERR_SOLVE, c->error);
  *count = c->allocation.chosen_buses.size();
  if (!buses) return SVCPLAN_OK;
  if (cap < *count) return fail(SVCPLAN_ERR_ARGUMENT, "buffer too small");
  std::memcpy(buses, c->allocation.chosen_buses.data(), *count * sizeof(int));
  return SVCPLAN_OK;
}

svcplan_status svcplan_report_cell_error(const svcplan_report* r, int cell,
                                         char* buf, size_t cap) {
  const RunCell* c = cell_at(r, cell);
  if (!c || !buf || cap == 0) return fail(SVCPLAN_ERR_ARGUMENT, "bad argument");
  std::snprintf(buf, cap, "%s", c->error.c_str());
  return SVCPLAN_OK;
}

svcplan_status svcplan_report_cell_validation(const svcplan_report* r,
                                              int cell, int* all_converged,
                                              double* max_loss_rel_err,
                                              double* max_v_dev,
                                              double* max_loop_residual) {
  const RunCell* c = cell_at(r, cell);
  if (!c) return fail(SVCPLAN_ERR_ARGUMENT, "cell out of range");
  if (!c->validation)
    return fail(SVCPLAN_ERR_ARGUMENT, "validation not run for this cell");
  const ValidationReport& v = *c->validation;
  if (all_converged) *all_converged = v.all_converged ? 1 : 0;
  if (max_loss_rel_err) *max_loss_rel_err = v.max_loss_rel_err;
  if (max_v_dev) *max_v_dev = v.max_v_dev;
  if (max_loop_residual) *max_loop_residual = v.max_loop_residual;
  return SVCPLAN_OK;
}

svcplan_status svcplan_report_write(const svcplan_report* r, const char* dir) {
  if (!r || !dir) return fail(SVCPLAN_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    write_outputs(r->report, dir);
    return SVCPLAN_OK;
  });
}

}  // extern "C"
