#include "svcplan/index.hpp"

#include "svcplan/errors.hpp"

namespace svcplan {

const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::GenP: return "gen_p";
    case Quantity::GenQ: return "gen_q";
    case Quantity::FlowP: return "flow_p";
    case Quantity::FlowQ: return "flow_q";
    case Quantity::LossP: return "loss_p";
    case Quantity::LossQ: return "loss_q";
    case Quantity::LossAuxP: return "loss_aux_p";
    case Quantity::LossAuxQ: return "loss_aux_q";
    case Quantity::VoltSq: return "volt_sq";
    case Quantity::DevUp: return "dev_up";
    case Quantity::DevDown: return "dev_down";
    case Quantity::SvcQ: return "svc_q";
    case Quantity::SvcGate: return "svc_gate";
    case Quantity::SvcOn: return "svc_on";
    case Quantity::LossConeAux: return "loss_cone_aux";
    case Quantity::LossConeVolt: return "loss_cone_volt";
    case Quantity::LossConeFlowP: return "loss_cone_flow_p";
    case Quantity::LossConeFlowQ: return "loss_cone_flow_q";
    case Quantity::CapToLimit: return "cap_to_limit";
    case Quantity::CapToP: return "cap_to_p";
    case Quantity::CapToQ: return "cap_to_q";
    case Quantity::CapFromLimit: return "cap_from_limit";
    case Quantity::CapFromP: return "cap_from_p";
    case Quantity::CapFromQ: return "cap_from_q";
    case Quantity::LoopSlackUp: return "loop_slack_up";
    case Quantity::LoopSlackDown: return "loop_slack_down";
    case Quantity::SvcRangeSlackLo: return "svc_range_slack_lo";
    case Quantity::SvcRangeSlackHi: return "svc_range_slack_hi";
    case Quantity::GateOnSlackLo: return "gate_on_slack_lo";
    case Quantity::GateOnSlackHi: return "gate_on_slack_hi";
    case Quantity::GateVoltSlackLo: return "gate_volt_slack_lo";
    case Quantity::GateVoltSlackHi: return "gate_volt_slack_hi";
    case Quantity::BudgetSlack: return "budget_slack";
  }
  return "?";
}

std::uint64_t MicpIndex::pack(Quantity q, int entity, int scenario) {
  return (static_cast<std::uint64_t>(static_cast<std::uint8_t>(q)) << 56) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(entity)) << 24) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(scenario + 1) &
                                    0xFFFFFFu);
}

int MicpIndex::add(Quantity q, int entity, int scenario) {
  auto [it, fresh] = lookup_.try_emplace(pack(q, entity, scenario),
                                         static_cast<int>(keys_.size()));
  if (!fresh) throw ValidationError("index: duplicate variable");
  keys_.push_back({q, entity, scenario});
  if (q == Quantity::SvcOn) delta_.push_back(it->second);
  return it->second;
}

int MicpIndex::at(Quantity q, int entity, int scenario) const {
  int pos = find(q, entity, scenario);
  if (pos < 0)
    throw ValidationError(std::string("index: missing ") + quantity_name(q) +
                          "[" + std::to_string(entity) + "," +
                          std::to_string(scenario) + "]");
  return pos;
}

int MicpIndex::find(Quantity q, int entity, int scenario) const {
  auto it = lookup_.find(pack(q, entity, scenario));
  return it == lookup_.end() ? -1 : it->second;
}

const VarKey& MicpIndex::key(int position) const {
  return keys_.at(static_cast<std::size_t>(position));
}

std::string MicpIndex::describe(int position) const {
  const VarKey& k = key(position);
  std::string s = quantity_name(k.qty);
  s += "[" + std::to_string(k.entity);
  if (k.scenario >= 0) s += ",s" + std::to_string(k.scenario);
  s += "]";
  return s;
}

}  // namespace svcplan
