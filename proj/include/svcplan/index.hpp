#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace svcplan {

// Named model quantities. Entities are ordinals into the case collections
// (generators, branches, buses, basis loops); scenario is the scenario
// ordinal, or -1 for scenario-independent variables.
enum class Quantity : std::uint8_t {
  GenP,
  GenQ,
  FlowP,      // receiving-end active flow, per branch
  FlowQ,      // receiving-end reactive flow, per branch
  LossP,      // active branch loss
  LossQ,      // reactive branch loss
  LossAuxP,   // loss-cone auxiliary (branches with r > 0)
  LossAuxQ,   // loss-cone auxiliary (branches with r = 0)
  VoltSq,     // squared voltage magnitude, per bus
  DevUp,      // voltage-deviation slack, above 1
  DevDown,    // voltage-deviation slack, below 1
  SvcQ,       // reactive injection of a candidate SVC
  SvcGate,    // linearization variable for (install flag) * VoltSq
  SvcOn,      // install flag, binary, scenario-independent
  LossConeAux,   // rotated-cone copies, per branch
  LossConeVolt,
  LossConeFlowP,
  LossConeFlowQ,
  CapToLimit,    // receiving-end thermal cone members, per rated branch
  CapToP,
  CapToQ,
  CapFromLimit,  // sending-end thermal cone members
  CapFromP,
  CapFromQ,
  LoopSlackUp,   // loop angle band slacks, per basis loop
  LoopSlackDown,
  SvcRangeSlackLo,  // SvcQ >= gate * b_min
  SvcRangeSlackHi,  // SvcQ <= gate * b_max
  GateOnSlackLo,    // gate >= flag * v_min^2
  GateOnSlackHi,    // gate <= flag * v_max^2
  GateVoltSlackLo,  // gate >= VoltSq - (1-flag) * v_max^2
  GateVoltSlackHi,  // gate <= VoltSq - (1-flag) * v_min^2
  BudgetSlack,      // single slack of the installation budget row
};

const char* quantity_name(Quantity q);

struct VarKey {
  Quantity qty;
  int entity = 0;
  int scenario = -1;

  bool operator==(const VarKey&) const = default;
};

// Bidirectional map between named quantities and flat variable positions.
class MicpIndex {
 public:
  int add(Quantity q, int entity, int scenario);
  int at(Quantity q, int entity, int scenario) const;  // throws if absent
  int find(Quantity q, int entity, int scenario) const;  // -1 if absent
  const VarKey& key(int position) const;
  int size() const { return static_cast<int>(keys_.size()); }

  // Positions of the SvcOn block, ascending candidate bus order.
  const std::vector<int>& delta_positions() const { return delta_; }
  std::string describe(int position) const;

 private:
  static std::uint64_t pack(Quantity q, int entity, int scenario);
  std::vector<VarKey> keys_;
  std::unordered_map<std::uint64_t, int> lookup_;
  std::vector<int> delta_;
};

}  // namespace svcplan
