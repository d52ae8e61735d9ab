#include "ghg/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "ghg/cost.hpp"

namespace ghg {

namespace {

struct ResidualArc {
  std::size_t to;
  std::size_t twin;
  double residual;
};

}  // namespace

MaxFlowResult max_flow(const FlowNetwork& net, double epsilon) {
  if (net.source >= net.node_count || net.sink >= net.node_count || net.source == net.sink) {
    throw ContractError("max_flow: invalid source/sink");
  }
  std::vector<std::vector<ResidualArc>> g(net.node_count);
  std::vector<std::pair<std::size_t, std::size_t>> where(net.arcs.size());
  for (std::size_t k = 0; k < net.arcs.size(); ++k) {
    const Arc& a = net.arcs[k];
    if (a.from >= net.node_count || a.to >= net.node_count) {
      throw ContractError("max_flow: arc endpoint out of range");
    }
    if (!(a.capacity >= 0.0) || std::isinf(a.capacity)) {
      throw ContractError("max_flow: capacities must be finite and non-negative");
    }
    if (a.from == a.to) {
      where[k] = {a.from, static_cast<std::size_t>(-1)};
      continue;
    }
    g[a.from].push_back({a.to, g[a.to].size(), a.capacity});
    g[a.to].push_back({a.from, g[a.from].size() - 1, 0.0});
    where[k] = {a.from, g[a.from].size() - 1};
  }

  MaxFlowResult result;
  const std::size_t n = net.node_count;
  std::vector<int> level(n);
  std::vector<std::size_t> next(n);
  auto build_levels = [&] {
    std::fill(level.begin(), level.end(), -1);
    std::deque<std::size_t> queue{net.source};
    level[net.source] = 0;
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      for (const ResidualArc& r : g[x]) {
        if (level[r.to] >= 0 || r.residual <= epsilon) continue;
        level[r.to] = level[x] + 1;
        queue.push_back(r.to);
      }
    }
    return level[net.sink] >= 0;
  };
  // Blocking flow by depth-first search along level-increasing arcs.
  auto push = [&](auto&& self, std::size_t x, double limit) -> double {
    if (x == net.sink) return limit;
    for (std::size_t& k = next[x]; k < g[x].size(); ++k) {
      ResidualArc& r = g[x][k];
      if (r.residual <= epsilon || level[r.to] != level[x] + 1) continue;
      const double pushed = self(self, r.to, std::min(limit, r.residual));
      if (pushed > 0.0) {
        r.residual -= pushed;
        g[r.to][r.twin].residual += pushed;
        return pushed;
      }
    }
    return 0.0;
  };
  while (build_levels()) {
    std::fill(next.begin(), next.end(), 0);
    for (;;) {
      const double pushed = push(push, net.source, std::numeric_limits<double>::infinity());
      if (!(pushed > 0.0)) break;
      result.flow_value += pushed;
    }
  }
  std::vector<bool> seen(n, false);
  for (std::size_t x = 0; x < n; ++x) seen[x] = level[x] >= 0;
  result.source_side = std::move(seen);
  result.arc_flow.resize(net.arcs.size(), 0.0);
  for (std::size_t k = 0; k < net.arcs.size(); ++k) {
    if (where[k].second == static_cast<std::size_t>(-1)) continue;
    const ResidualArc& r = g[where[k].first][where[k].second];
    result.arc_flow[k] = net.arcs[k].capacity - r.residual;
  }
  return result;
}

double cut_capacity(const FlowNetwork& net, const std::vector<bool>& source_side) {
  double c = 0.0;
  for (const Arc& a : net.arcs)
    if (source_side[a.from] && !source_side[a.to]) c += a.capacity;
  return c;
}

}  // namespace ghg
