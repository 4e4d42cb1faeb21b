#include "svcplan/lfb.hpp"

#include <queue>

#include "svcplan/errors.hpp"

namespace svcplan {

FlowIncidence build_incidence(const NetworkCase& c) {
  FlowIncidence inc;
  inc.num_buses = static_cast<int>(c.buses.size());
  inc.num_branches = static_cast<int>(c.branches.size());
  inc.ends.reserve(c.branches.size());
  for (const Branch& k : c.branches)
    inc.ends.push_back({c.bus_ordinal(k.from_bus), c.bus_ordinal(k.to_bus)});
  return inc;
}

CycleBasis build_cycle_basis(const NetworkCase& c) {
  const int nb = static_cast<int>(c.buses.size());
  const int nk = static_cast<int>(c.branches.size());

  // BFS spanning tree from the first bus; parallel branches and the
  // remaining chords each close one fundamental cycle.
  std::vector<std::vector<std::pair<int, int>>> adj(nb);  // (neighbor, branch)
  FlowIncidence inc = build_incidence(c);
  for (int k = 0; k < nk; ++k) {
    auto [f, t] = inc.ends[k];
    adj[f].push_back({t, k});
    adj[t].push_back({f, k});
  }

  std::vector<int> parent_bus(nb, -1), parent_branch(nb, -1), depth(nb, 0);
  std::vector<char> visited(nb, 0), in_tree(nk, 0);
  std::queue<int> q;
  visited[0] = 1;
  q.push(0);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (auto [v, k] : adj[u]) {
      if (visited[v]) continue;
      visited[v] = 1;
      parent_bus[v] = u;
      parent_branch[v] = k;
      depth[v] = depth[u] + 1;
      in_tree[k] = 1;
      q.push(v);
    }
  }
  for (int i = 0; i < nb; ++i)
    if (!visited[i]) throw ValidationError("cycle basis: graph not connected");

  CycleBasis basis;
  basis.num_branches = nk;
  for (int k = 0; k < nk; ++k) {
    if (in_tree[k]) continue;
    auto [f, t] = inc.ends[k];
    // loop oriented along the chord: f -> t by the chord, back t -> f on
    // the tree path (up from t to the common ancestor, then down to f)
    std::vector<std::pair<int, int>> loop;
    loop.push_back({k, +1});
    int a = t, b = f;
    std::vector<std::pair<int, int>> down;  // b-side, collected bottom-up
    while (a != b) {
      if (depth[a] >= depth[b]) {
        int pk = parent_branch[a];
        // loop walks a -> parent(a); +1 when the branch points the same way
        loop.push_back({pk, inc.ends[pk].first == a ? +1 : -1});
        a = parent_bus[a];
      } else {
        int pk = parent_branch[b];
        // loop walks parent(b) -> b on this side
        down.push_back({pk, inc.ends[pk].second == b ? +1 : -1});
        b = parent_bus[b];
      }
    }
    for (auto it = down.rbegin(); it != down.rend(); ++it) loop.push_back(*it);
    basis.loops.push_back(std::move(loop));
  }
  return basis;
}

}  // namespace svcplan
