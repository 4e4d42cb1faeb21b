#pragma once

#include <string>
#include <vector>

#include "svcplan/index.hpp"
#include "svcplan/lfb.hpp"
#include "svcplan/network.hpp"
#include "svcplan/program.hpp"

namespace svcplan {

struct WeightScheme {
  double a1 = 1.0;     // network-loss weight
  double a2 = 0.0;     // voltage-deviation weight
  double alpha = 1e-3; // loss-cone penalty scale

  static WeightScheme preset(int id);  // 1..4
};

struct SvcSpec {
  double b_min = 0.0;
  double b_max = 0.3;
  int n_v = 0;  // installation budget
};

struct ModelOptions {
  double eps_theta = 0.00872664625997164788;  // pi/360, loop angle band
};

enum class RowKind : std::uint8_t {
  RealBalance,
  ReactiveBalance,
  VoltageDrop,
  LossRatio,     // x*LossP = r*LossQ (or LossP = 0 when r = 0)
  LossAuxLink,   // LossP = 2 r aux (or LossQ = 2 x aux when r = 0)
  ConeLink,      // cone-member copy equalities
  CapLimit,      // thermal cone head pinned to s_max
  AbsDeviation,  // VoltSq - 1 + DevUp - DevDown = 0
  LoopBandUp,
  LoopBandDown,
  SvcRangeLo,
  SvcRangeHi,
  GateOnLo,
  GateOnHi,
  GateVoltLo,
  GateVoltHi,
  Budget,
};

struct RowInfo {
  RowKind kind;
  int scenario = -1;
  int entity = -1;
};

enum class ConeUse : std::uint8_t { Loss, CapTo, CapFrom };

struct ConeInfo {
  ConeUse use;
  int scenario = -1;
  int entity = -1;
  int block = -1;  // index into program.blocks
};

struct MicpModel {
  ConicProgram program;
  MicpIndex index;
  std::vector<RowInfo> rows;    // parallel to program rows
  std::vector<ConeInfo> cones;
  std::vector<int> candidates;  // bus ids, ascending
  int num_loops = 0;
  WeightScheme weights;
  SvcSpec svc;
  ModelOptions options;
};

// Variable layout shared by allocate_index and build_micp; positions are a
// deterministic function of the case, scenario count and candidate list.
MicpIndex allocate_index(const NetworkCase& c, const ScenarioSet& scenarios,
                         const std::vector<int>& candidate_ids);

// Assembles the complete mixed-integer conic model: per-scenario line-flow
// blocks, SVC reactive balance, deviation and install-flag linearizations,
// budget row and box bounds. Deterministic: identical inputs give an
// identical program.
MicpModel build_micp(const NetworkCase& c, const ScenarioSet& scenarios,
                     const WeightScheme& w, const SvcSpec& svc,
                     const ModelOptions& opt = {});

// Per-scenario quantities read back from a primal vector.
struct ScenarioMetrics {
  double loss = 0.0;   // p.u.
  double dev_w = 0.0;  // sum |V^2 - 1|
  double dev_v = 0.0;  // sum |V - 1|
  std::vector<double> volt;   // by bus ordinal
  std::vector<double> svc_b;  // by candidate ordinal, recovered SvcQ/VoltSq
};

ScenarioMetrics extract_metrics(const MicpModel& m, const NetworkCase& c,
                                const std::vector<double>& primal,
                                int scenario);

// max over branches of 2*aux*W - (P^2 + Q^2), clamped at 0.
double cone_mismatch(const MicpModel& m, const NetworkCase& c,
                     const std::vector<double>& primal, int scenario);

// max absolute loop-band residual sum_k C(c,k)(tau(Px - Qr) + shift).
double loop_residual(const MicpModel& m, const NetworkCase& c,
                     const std::vector<double>& primal, int scenario);

// Human-readable constraint listing for one scenario (debug aid).
std::string dump_scenario(const MicpModel& m, const NetworkCase& c,
                          int scenario);

}  // namespace svcplan
