#pragma once

#include <vector>

#include "svcplan/network.hpp"

namespace svcplan {

// Signed bus-by-branch incidences for receiving-end flows (m_f) and losses
// (m_l), stored column-wise: one entry list per branch.
struct FlowIncidence {
  int num_buses = 0;
  int num_branches = 0;
  // per branch: (sending bus ordinal, receiving bus ordinal)
  std::vector<std::pair<int, int>> ends;

  int mf(int bus_ord, int branch) const {
    if (ends[branch].first == bus_ord) return 1;
    if (ends[branch].second == bus_ord) return -1;
    return 0;
  }
  int ml(int bus_ord, int branch) const {
    return ends[branch].first == bus_ord ? 1 : 0;
  }
};

// Fundamental cycles of a BFS spanning tree; one loop per chord, oriented
// along the chord's direction.
struct CycleBasis {
  int num_branches = 0;
  // per loop: (branch index, +1/-1 alignment with the loop direction)
  std::vector<std::vector<std::pair<int, int>>> loops;

  std::size_t size() const { return loops.size(); }
};

FlowIncidence build_incidence(const NetworkCase& c);
CycleBasis build_cycle_basis(const NetworkCase& c);

}  // namespace svcplan
