#include "ghg/trws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ghg {

namespace {

// Message state of one TRW-S run. Messages live on directed edges:
// to_u[e] is the message sent by edge.v to edge.u, to_v[e] the reverse.
class TrwsState {
 public:
  explicit TrwsState(const GraphicalModel& m) : model_(m), n_(m.node_count()) {
    node_off_.resize(n_ + 1, 0);
    for (NodeId i = 0; i < n_; ++i) node_off_[i + 1] = node_off_[i] + m.label_count(i);
    unary_.resize(node_off_[n_]);
    for (NodeId i = 0; i < n_; ++i) {
      auto un = m.unary(i);
      std::copy(un.begin(), un.end(), unary_.begin() + static_cast<std::ptrdiff_t>(node_off_[i]));
    }

    const std::size_t ne = m.edge_count();
    table_off_.resize(ne + 1, 0);
    to_u_off_.resize(ne);
    to_v_off_.resize(ne);
    std::size_t msg_size = 0;
    for (std::size_t e = 0; e < ne; ++e) {
      const Edge& ed = m.edge(e);
      table_off_[e + 1] = table_off_[e] + m.label_count(ed.u) * m.label_count(ed.v);
      to_u_off_[e] = msg_size;
      msg_size += m.label_count(ed.u);
      to_v_off_[e] = msg_size;
      msg_size += m.label_count(ed.v);
    }
    tables_.resize(table_off_[ne]);
    const double beta = m.pairwise_weight();
    for (std::size_t e = 0; e < ne; ++e) {
      std::span<double> t(tables_.data() + table_off_[e], table_off_[e + 1] - table_off_[e]);
      m.fill_pairwise(e, t);
      for (double& x : t) x = is_infinite(x) ? kInfinity : beta * x;
    }
    messages_.assign(msg_size, 0.0);

    gamma_.resize(n_);
    chains_in_node_.resize(n_);
    for (NodeId i = 0; i < n_; ++i) {
      std::size_t in = 0, out = 0;
      for (const Incidence& inc : m.neighbors(i)) (inc.other < i ? in : out)++;
      chains_in_node_[i] = std::max(in, out);
      gamma_[i] = chains_in_node_[i] > 0 ? 1.0 / static_cast<double>(chains_in_node_[i]) : 1.0;
    }
    build_chains();
  }

  void pass(bool forward, TrwsDiagnostics& diag) {
    std::vector<double> theta_hat, scaled;
    for (std::size_t step = 0; step < n_; ++step) {
      const NodeId i = forward ? static_cast<NodeId>(step) : static_cast<NodeId>(n_ - 1 - step);
      const std::size_t li = model_.label_count(i);
      accumulate(i, theta_hat);
      for (const Incidence& inc : model_.neighbors(i)) {
        if ((inc.other > i) != forward) continue;
        const double* incoming = message_into(inc.edge, i);
        scaled.resize(li);
        for (std::size_t a = 0; a < li; ++a) {
          scaled[a] = (is_infinite(incoming[a]) || is_infinite(theta_hat[a]))
                          ? kInfinity
                          : gamma_[i] * theta_hat[a] - incoming[a];
        }
        send(inc, i, scaled, diag);
      }
    }
  }

  double lower_bound() const {
    std::vector<double> reparam(unary_.size());
    for (NodeId i = 0; i < n_; ++i) {
      std::vector<double> tmp;
      accumulate(i, tmp);
      std::copy(tmp.begin(), tmp.end(), reparam.begin() + static_cast<std::ptrdiff_t>(node_off_[i]));
    }
    double bound = model_.constant();
    for (NodeId i = 0; i < n_; ++i) {
      if (chains_in_node_[i] != 0) continue;
      const double* r = reparam.data() + node_off_[i];
      bound += *std::min_element(r, r + model_.label_count(i));
    }
    std::vector<double> f, g;
    for (const auto& chain : chains_) {
      const NodeId start = model_.edge(chain.front()).u;
      const std::size_t ls = model_.label_count(start);
      f.assign(reparam.begin() + static_cast<std::ptrdiff_t>(node_off_[start]),
               reparam.begin() + static_cast<std::ptrdiff_t>(node_off_[start] + ls));
      for (double& x : f) x *= gamma_[start];
      for (std::size_t e : chain) {
        const Edge& ed = model_.edge(e);
        const std::size_t lu = model_.label_count(ed.u);
        const std::size_t lv = model_.label_count(ed.v);
        const double* t = tables_.data() + table_off_[e];
        const double* mu = messages_.data() + to_u_off_[e];
        const double* mv = messages_.data() + to_v_off_[e];
        g.assign(lv, kInfinity);
        for (std::size_t a = 0; a < lu; ++a) {
          if (is_infinite(f[a]) || is_infinite(mu[a])) continue;
          for (std::size_t b = 0; b < lv; ++b) {
            if (is_infinite(mv[b]) || is_infinite(t[a * lv + b])) continue;
            g[b] = std::min(g[b], f[a] + (t[a * lv + b] - mu[a] - mv[b]));
          }
        }
        const double* r = reparam.data() + node_off_[ed.v];
        for (std::size_t b = 0; b < lv; ++b) g[b] += gamma_[ed.v] * r[b];
        f.swap(g);
      }
      bound += *std::min_element(f.begin(), f.end());
    }
    return bound;
  }

  /// Energy of `l` from the cached (beta-scaled) tables.
  double energy(const Labeling& l) const {
    double e = model_.constant();
    for (NodeId i = 0; i < n_; ++i) e += unary_[node_off_[i] + l[i]];
    for (std::size_t k = 0; k < model_.edge_count(); ++k) {
      const Edge& ed = model_.edge(k);
      e += tables_[table_off_[k] + l[ed.u] * model_.label_count(ed.v) + l[ed.v]];
    }
    return e;
  }

  Labeling round(std::vector<NodeId>& fallback) const {
    Labeling l(n_, 0);
    std::vector<double> cost;
    for (NodeId i = 0; i < n_; ++i) {
      const std::size_t li = model_.label_count(i);
      cost.assign(unary_.begin() + static_cast<std::ptrdiff_t>(node_off_[i]),
                  unary_.begin() + static_cast<std::ptrdiff_t>(node_off_[i] + li));
      for (const Incidence& inc : model_.neighbors(i)) {
        if (inc.other < i) {
          const Edge& ed = model_.edge(inc.edge);
          const double* t = tables_.data() + table_off_[inc.edge];
          const std::size_t lv = model_.label_count(ed.v);
          // i is edge.v here because other < i
          for (std::size_t a = 0; a < li; ++a) cost[a] += t[l[inc.other] * lv + a];
        } else {
          const double* m = message_into(inc.edge, i);
          for (std::size_t a = 0; a < li; ++a) cost[a] += m[a];
        }
      }
      l[i] = argmin(cost);
      if (is_infinite(cost[l[i]])) {
        l[i] = argmin(model_.unary(i));
        fallback.push_back(i);
      }
    }
    return l;
  }

 private:
  static Label argmin(std::span<const double> v) {
    Label best = 0;
    for (Label a = 1; a < v.size(); ++a)
      if (v[a] < v[best]) best = a;
    return best;
  }

  const double* message_into(std::size_t e, NodeId i) const {
    return messages_.data() + (model_.edge(e).u == i ? to_u_off_[e] : to_v_off_[e]);
  }

  void accumulate(NodeId i, std::vector<double>& out) const {
    const std::size_t li = model_.label_count(i);
    out.assign(unary_.begin() + static_cast<std::ptrdiff_t>(node_off_[i]),
               unary_.begin() + static_cast<std::ptrdiff_t>(node_off_[i] + li));
    for (const Incidence& inc : model_.neighbors(i)) {
      const double* m = message_into(inc.edge, i);
      for (std::size_t a = 0; a < li; ++a) out[a] += m[a];
    }
  }

  void send(const Incidence& inc, NodeId i, const std::vector<double>& scaled,
            TrwsDiagnostics& diag) {
    const std::size_t e = inc.edge;
    const Edge& ed = model_.edge(e);
    const std::size_t li = model_.label_count(i);
    const std::size_t lo = model_.label_count(inc.other);
    const double* t = tables_.data() + table_off_[e];
    double* out = messages_.data() + (inc.node_is_u ? to_v_off_[e] : to_u_off_[e]);
    const std::size_t lv = model_.label_count(ed.v);
    for (std::size_t b = 0; b < lo; ++b) out[b] = kInfinity;
    for (std::size_t a = 0; a < li; ++a) {
      if (is_infinite(scaled[a])) continue;
      for (std::size_t b = 0; b < lo; ++b) {
        const double w = inc.node_is_u ? t[a * lv + b] : t[b * lv + a];
        out[b] = std::min(out[b], scaled[a] + w);
      }
    }
    const double lowest = *std::min_element(out, out + lo);
    if (is_infinite(lowest)) {
      diag.infinite_message_row = true;
      std::fill(out, out + lo, 0.0);
      return;
    }
    for (std::size_t b = 0; b < lo; ++b)
      if (!is_infinite(out[b])) out[b] -= lowest;
  }

  // Monotone chains: at every node the k-th edge to a lower-indexed
  // neighbour is continued by the k-th edge to a higher-indexed one.
  void build_chains() {
    std::vector<std::vector<std::size_t>> in_edges(n_), out_edges(n_);
    for (NodeId i = 0; i < n_; ++i)
      for (const Incidence& inc : model_.neighbors(i))
        (inc.other < i ? in_edges[i] : out_edges[i]).push_back(inc.edge);
    std::vector<std::size_t> pos_in_v(model_.edge_count());
    for (NodeId i = 0; i < n_; ++i)
      for (std::size_t p = 0; p < in_edges[i].size(); ++p) pos_in_v[in_edges[i][p]] = p;
    for (NodeId i = 0; i < n_; ++i) {
      for (std::size_t q = in_edges[i].size(); q < out_edges[i].size(); ++q) {
        std::vector<std::size_t> chain{out_edges[i][q]};
        for (;;) {
          const std::size_t e = chain.back();
          const NodeId j = model_.edge(e).v;
          const std::size_t p = pos_in_v[e];
          if (p >= out_edges[j].size()) break;
          chain.push_back(out_edges[j][p]);
        }
        chains_.push_back(std::move(chain));
      }
    }
  }

  const GraphicalModel& model_;
  std::size_t n_;
  std::vector<std::size_t> node_off_;
  std::vector<double> unary_;
  std::vector<std::size_t> table_off_;
  std::vector<double> tables_;
  std::vector<std::size_t> to_u_off_, to_v_off_;
  std::vector<double> messages_;
  std::vector<double> gamma_;
  std::vector<std::size_t> chains_in_node_;
  std::vector<std::vector<std::size_t>> chains_;
};

}  // namespace

TrwsResult solve_trws(const GraphicalModel& model, const TrwsConfig& config) {
  if (config.iterations < 1) throw ContractError("solve_trws: iterations must be >= 1");
  for (NodeId i = 0; i < model.node_count(); ++i)
    for (double v : model.unary(i))
      if (!std::isfinite(v)) throw ContractError("solve_trws: unary costs must be finite");

  TrwsResult result;
  TrwsState state(model);
  double best = kInfinity;
  for (int it = 0; it < config.iterations; ++it) {
    state.pass(true, result.diagnostics);
    state.pass(false, result.diagnostics);
    result.bound_history.push_back(state.lower_bound());
    // Every iteration yields a labeling; the lowest-energy one is kept.
    std::vector<NodeId> fallback;
    Labeling l = state.round(fallback);
    const double e = state.energy(l);
    if (it == 0 || e < best) {
      best = e;
      result.labeling = std::move(l);
      result.diagnostics.unary_fallback_nodes = std::move(fallback);
    }
  }
  result.lower_bound = result.bound_history.back();
  return result;
}

std::vector<NodeId> extract_inliers(const Labeling& labeling, Label outlier_label) {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < labeling.size(); ++i)
    if (labeling[i] != outlier_label) out.push_back(static_cast<NodeId>(i));
  return out;
}

std::vector<NodeId> extract_inliers(const GraphicalModel& model, const Labeling& labeling) {
  if (labeling.size() != model.node_count()) {
    throw ContractError("extract_inliers: labeling size mismatch");
  }
  std::vector<NodeId> out;
  for (NodeId i = 0; i < labeling.size(); ++i)
    if (labeling[i] + 1 != model.label_count(i)) out.push_back(i);
  return out;
}

}  // namespace ghg
