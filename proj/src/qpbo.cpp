#include "ghg/qpbo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ghg {

namespace {

double finite_mass(const GraphicalModel& model) {
  double mass = 0.0;
  for (NodeId u = 0; u < model.node_count(); ++u)
    for (double v : model.unary(u))
      if (!is_infinite(v)) mass += std::abs(v);
  double pair_mass = 0.0;
  for (std::size_t e = 0; e < model.edge_count(); ++e)
    for (Label a = 0; a < 2; ++a)
      for (Label b = 0; b < 2; ++b) {
        const double v = model.pairwise(e, a, b);
        if (!is_infinite(v)) pair_mass += std::abs(v);
      }
  return mass + model.pairwise_weight() * pair_mass + std::abs(model.constant());
}

}  // namespace

void require_binary(const GraphicalModel& model) {
  for (NodeId u = 0; u < model.node_count(); ++u) {
    if (model.label_count(u) != 2) {
      throw ContractError("binary model required; node " + std::to_string(u) + " has " +
                          std::to_string(model.label_count(u)) + " labels");
    }
  }
}

FlowNetwork build_implication_network(const GraphicalModel& model, double infinity_capacity,
                                      double* constant_out) {
  require_binary(model);
  const std::size_t n = model.node_count();
  auto clamp = [&](double v) { return is_infinite(v) ? infinity_capacity : v; };
  auto pos = [](NodeId u) { return 2 + static_cast<std::size_t>(u); };
  auto neg = [n](NodeId u) { return 2 + n + static_cast<std::size_t>(u); };

  FlowNetwork net;
  net.node_count = 2 + 2 * n;
  net.source = 0;
  net.sink = 1;

  double constant = model.constant();
  std::vector<double> coeff(n, 0.0);  // energy change when x_u switches 0 -> 1
  for (NodeId u = 0; u < n; ++u) {
    const double c0 = clamp(model.unary(u, 0));
    const double c1 = clamp(model.unary(u, 1));
    constant += c0;
    coeff[u] += c1 - c0;
  }
  const double beta = model.pairwise_weight();
  for (std::size_t e = 0; e < model.edge_count(); ++e) {
    const Edge& ed = model.edge(e);
    auto w = [&](Label a, Label b) {
      const double v = model.pairwise(e, a, b);
      return is_infinite(v) ? infinity_capacity : beta * v;
    };
    const double a00 = w(0, 0), a01 = w(0, 1), a10 = w(1, 0), a11 = w(1, 1);
    // a00 + (a10-a00) x_u + (a01-a00) x_v + lambda x_u x_v
    constant += a00;
    coeff[ed.u] += a10 - a00;
    coeff[ed.v] += a01 - a00;
    const double lambda = a00 + a11 - a01 - a10;
    if (lambda < 0.0) {
      // lambda x_u x_v = lambda x_v + |lambda| [x_u = 0, x_v = 1]
      coeff[ed.v] += lambda;
      const double c = -lambda / 2.0;
      net.arcs.push_back({pos(ed.u), pos(ed.v), c});
      net.arcs.push_back({neg(ed.v), neg(ed.u), c});
    } else if (lambda > 0.0) {
      const double c = lambda / 2.0;
      net.arcs.push_back({neg(ed.v), pos(ed.u), c});
      net.arcs.push_back({neg(ed.u), pos(ed.v), c});
    }
  }
  for (NodeId u = 0; u < n; ++u) {
    const double c = coeff[u];
    if (c > 0.0) {
      net.arcs.push_back({net.source, pos(u), c / 2.0});
      net.arcs.push_back({neg(u), net.sink, c / 2.0});
    } else if (c < 0.0) {
      constant += c;
      net.arcs.push_back({pos(u), net.sink, -c / 2.0});
      net.arcs.push_back({net.source, neg(u), -c / 2.0});
    }
  }
  if (constant_out) *constant_out = constant;
  return net;
}

PartialLabeling qpbo(const GraphicalModel& model, QpboStats* stats) {
  require_binary(model);
  const std::size_t n = model.node_count();
  const double big = 1.0 + finite_mass(model);
  double constant = 0.0;
  const FlowNetwork net = build_implication_network(model, big, &constant);
  double max_cap = 1.0;
  for (const Arc& a : net.arcs) max_cap = std::max(max_cap, a.capacity);
  const MaxFlowResult flow = max_flow(net, 1e-12 * max_cap);

  PartialLabeling out(n);
  for (NodeId u = 0; u < n; ++u) {
    const bool zero = flow.source_side[2 + u];
    const bool one = flow.source_side[2 + n + u];
    if (zero && !one) out[u] = 0;
    if (one && !zero) out[u] = 1;
  }

  // A clamped infinity must never be realized by a labeled pair.
  std::size_t demoted = 0;
  for (std::size_t e = 0; e < model.edge_count(); ++e) {
    const Edge& ed = model.edge(e);
    if (!out[ed.u] || !out[ed.v]) continue;
    if (is_infinite(model.pairwise(e, *out[ed.u], *out[ed.v]))) {
      out[ed.u].reset();
      out[ed.v].reset();
      demoted += 2;
    }
  }
  if (stats) {
    stats->lower_bound = constant + flow.flow_value;
    stats->infinity_capacity = big;
    stats->demoted_nodes = demoted;
  }
  return out;
}

std::size_t count_infinite_pairs(const GraphicalModel& model) {
  require_binary(model);
  std::size_t count = 0;
  for (std::size_t e = 0; e < model.edge_count(); ++e)
    if (is_infinite(model.pairwise(e, 1, 1))) ++count;
  return count;
}

}  // namespace ghg
