#include "ghg/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <omp.h>

namespace ghg {

namespace {

std::size_t state_count(const GraphicalModel& model) {
  double states = 1.0;
  for (NodeId u = 0; u < model.node_count(); ++u) {
    if (model.label_count(u) == 0) throw ContractError("brute_force: node without labels");
    states *= static_cast<double>(model.label_count(u));
  }
  if (states > kBruteForceGuard) {
    throw ContractError("brute_force: state space of " + std::to_string(states) +
                        " labelings exceeds the guard");
  }
  return static_cast<std::size_t>(states);
}

void decode(const GraphicalModel& model, std::size_t index, Labeling& l) {
  for (std::size_t k = model.node_count(); k-- > 0;) {
    const std::size_t m = model.label_count(static_cast<NodeId>(k));
    l[k] = static_cast<Label>(index % m);
    index /= m;
  }
}

struct Partial {
  Cost best = Cost::infinity();
  std::vector<Labeling> optima;
  std::size_t count = 0;  // optima seen, including those over the cap
};

void scan(const GraphicalModel& model, std::size_t begin, std::size_t end, std::size_t cap,
          Partial& out) {
  Labeling l(model.node_count());
  for (std::size_t i = begin; i < end; ++i) {
    decode(model, i, l);
    const Cost e = evaluate_energy(model, l);
    if (e < out.best) {
      out.best = e;
      out.optima.clear();
      out.count = 0;
    }
    if (e == out.best) {
      if (out.optima.size() < cap) out.optima.push_back(l);
      ++out.count;
    }
  }
}

OracleResult merge(std::vector<Partial>& parts, std::size_t cap) {
  OracleResult r;
  r.cap = cap;
  for (const Partial& p : parts) r.optimal_energy = std::min(r.optimal_energy, p.best);
  std::size_t count = 0;
  for (Partial& p : parts) {
    if (p.best != r.optimal_energy) continue;
    count += p.count;
    for (auto& l : p.optima)
      if (r.optima.size() < cap) r.optima.push_back(std::move(l));
  }
  r.truncated = count > r.optima.size();
  return r;
}

}  // namespace

OracleResult brute_force_serial(const GraphicalModel& model, std::size_t cap) {
  const std::size_t states = state_count(model);
  std::vector<Partial> parts(1);
  scan(model, 0, states, cap, parts[0]);
  return merge(parts, cap);
}

OracleResult brute_force(const GraphicalModel& model, std::size_t cap) {
  const std::size_t states = state_count(model);
  const std::size_t chunks = std::min<std::size_t>(states, 4 * static_cast<std::size_t>(omp_get_max_threads()));
  std::vector<Partial> parts(chunks);
  const auto n = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static, 1)
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    const auto k = static_cast<std::size_t>(c);
    scan(model, states * k / chunks, states * (k + 1) / chunks, cap, parts[k]);
  }
  return merge(parts, cap);
}

Cost constrained_minimum(const GraphicalModel& model, const PartialLabeling& partial) {
  if (partial.size() != model.node_count()) throw ContractError("constrained_minimum: size mismatch");
  std::vector<NodeId> free;
  Labeling l(model.node_count(), 0);
  for (NodeId u = 0; u < model.node_count(); ++u) {
    if (partial[u]) {
      if (*partial[u] >= model.label_count(u)) throw ContractError("constrained_minimum: bad label");
      l[u] = *partial[u];
    } else {
      free.push_back(u);
    }
  }
  double states = 1.0;
  for (NodeId u : free) states *= static_cast<double>(model.label_count(u));
  if (states > kBruteForceGuard) throw ContractError("constrained_minimum: state space exceeds guard");
  Cost best = Cost::infinity();
  const auto total = static_cast<std::size_t>(states);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t idx = i;
    for (std::size_t k = free.size(); k-- > 0;) {
      const std::size_t m = model.label_count(free[k]);
      l[free[k]] = static_cast<Label>(idx % m);
      idx /= m;
    }
    best = std::min(best, evaluate_energy(model, l));
  }
  return best;
}

bool check_persistency(const GraphicalModel& model, const PartialLabeling& partial,
                       const OracleResult& oracle) {
  if (partial.size() != model.node_count()) throw ContractError("check_persistency: size mismatch");
  for (const Labeling& opt : oracle.optima) {
    bool agrees = true;
    for (std::size_t u = 0; u < opt.size() && agrees; ++u) agrees = !partial[u] || *partial[u] == opt[u];
    if (agrees) return true;
  }
  if (!oracle.truncated) return false;
  return constrained_minimum(model, partial) == oracle.optimal_energy;
}

bool check_persistency(const GraphicalModel& model, const PartialLabeling& partial) {
  return check_persistency(model, partial, brute_force_serial(model));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double dyadic(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng) / 64.0;
}

namespace {

std::vector<std::vector<double>> random_unaries(Rng& rng, const std::vector<std::size_t>& labels) {
  std::vector<std::vector<double>> u(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t l = 0; l < labels[i]; ++l) u[i].push_back(dyadic(rng, -64, 64));
  return u;
}

bool coin(Rng& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

double random_beta(Rng& rng) {
  static constexpr double kBetas[] = {1.0, 0.5, 2.0, 1.5};
  return kBetas[std::uniform_int_distribution<int>(0, 3)(rng)];
}

}  // namespace

GraphicalModel random_binary_model(Rng& rng, std::size_t nodes, double edge_probability,
                                   bool hard_off_diagonal) {
  GraphicalModel m(random_unaries(rng, std::vector<std::size_t>(nodes, 2)), random_beta(rng));
  m.set_constant(dyadic(rng, -32, 32));
  for (NodeId u = 0; u < nodes; ++u)
    for (NodeId v = u + 1; v < nodes; ++v) {
      if (!coin(rng, edge_probability)) continue;
      std::array<double, 4> t{};
      switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
        case 0: {  // submodular
          const double w = dyadic(rng, 0, 64);
          t = {0.0, w, w + dyadic(rng, 0, 16), dyadic(rng, -16, 16)};
          break;
        }
        case 1: {  // supermodular
          const double w = dyadic(rng, 0, 64);
          t = {w, 0.0, dyadic(rng, -8, 8), w + dyadic(rng, 0, 16)};
          break;
        }
        case 2:
          for (double& x : t) x = dyadic(rng, -64, 64);
          break;
        case 3: {  // Potts
          const double w = dyadic(rng, -32, 64);
          t = {0.0, w, w, 0.0};
          break;
        }
        default:  // hard constraint away from (0,0)
          for (double& x : t) x = dyadic(rng, 0, 64);
          t[hard_off_diagonal ? 1 + std::uniform_int_distribution<int>(0, 2)(rng) : 3] = kInfinity;
          break;
      }
      m.add_edge(u, v, t);
    }
  return m;
}

GraphicalModel random_zero_form_model(Rng& rng, std::size_t nodes, double edge_probability) {
  GraphicalModel m(random_unaries(rng, std::vector<std::size_t>(nodes, 2)), random_beta(rng));
  for (NodeId u = 0; u < nodes; ++u)
    for (NodeId v = u + 1; v < nodes; ++v) {
      if (!coin(rng, edge_probability)) continue;
      const double d = coin(rng, 0.15) ? kInfinity : dyadic(rng, -64, 64);
      const double t[4] = {0.0, 0.0, 0.0, d};
      m.add_edge(u, v, t);
    }
  return m;
}

namespace {

std::vector<double> random_table(Rng& rng, std::size_t a, std::size_t b) {
  std::vector<double> t(a * b);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t k = 0; k < b; ++k)
      t[i * b + k] = (i + k > 0 && coin(rng, 0.1)) ? kInfinity : dyadic(rng, 0, 96);
  return t;
}

std::vector<std::size_t> random_label_counts(Rng& rng, std::size_t nodes, std::size_t max_labels) {
  std::vector<std::size_t> labels(nodes);
  for (auto& l : labels) l = std::uniform_int_distribution<std::size_t>(2, max_labels)(rng);
  return labels;
}

}  // namespace

GraphicalModel random_sparse_model(Rng& rng, std::size_t nodes, std::size_t max_labels,
                                   double edge_probability) {
  const auto labels = random_label_counts(rng, nodes, max_labels);
  GraphicalModel m(random_unaries(rng, labels), random_beta(rng));
  for (NodeId u = 0; u < nodes; ++u)
    for (NodeId v = u + 1; v < nodes; ++v)
      if (coin(rng, edge_probability)) m.add_edge(u, v, random_table(rng, labels[u], labels[v]));
  return m;
}

GraphicalModel random_tree_model(Rng& rng, std::size_t nodes, std::size_t max_labels) {
  const auto labels = random_label_counts(rng, nodes, max_labels);
  GraphicalModel m(random_unaries(rng, labels), random_beta(rng));
  // Random spanning tree over a shuffled node order.
  std::vector<NodeId> order(nodes);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 1; i < nodes; ++i) {
    const NodeId child = order[i];
    const NodeId parent = order[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)];
    m.add_edge(child, parent, random_table(rng, labels[child], labels[parent]));
  }
  return m;
}

std::size_t Prop1Report::passed() const {
  return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(),
                                                [](const Prop1Trial& t) { return t.passed; }));
}

namespace {

Prop1Trial run_prop1_trial(std::size_t min_nodes, std::size_t max_nodes, std::uint64_t seed,
                           double tolerance) {
  Rng rng(seed);
  Prop1Trial t;
  t.nodes = std::uniform_int_distribution<std::size_t>(min_nodes, max_nodes)(rng);
  const GraphicalModel master = random_zero_form_model(rng, t.nodes);
  const OracleResult opt = brute_force_serial(master, 1);
  const Labeling& best = opt.optima.front();
  t.master_optimum = opt.optimal_energy.value();

  std::vector<NodeId> keep;
  const double extra = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (NodeId u = 0; u < t.nodes; ++u)
    if (best[u] == 1 || coin(rng, extra)) keep.push_back(u);
  t.kept = keep.size();

  Labeling extended(t.nodes, 0);
  if (!keep.empty()) {
    const InducedSubmodel sub = induce_submodel(master, keep);
    const OracleResult sub_opt = brute_force_serial(sub.model, 1);
    const PartialLabeling ext =
        extend_partial(t.nodes, to_partial(sub_opt.optima.front()), sub.node_map, 0);
    for (std::size_t u = 0; u < t.nodes; ++u) extended[u] = *ext[u];
  }
  const Cost e = evaluate_energy(master, extended);
  t.extended_energy = e.value();
  t.passed = e.finite() && opt.optimal_energy.finite()
                 ? std::abs(e.value() - t.master_optimum) <= tolerance
                 : e == opt.optimal_energy;
  return t;
}

}  // namespace

Prop1Report verify_prop1(std::size_t trials, std::size_t min_nodes, std::size_t max_nodes,
                         std::uint64_t seed, double tolerance) {
  if (min_nodes < 1 || min_nodes > max_nodes) throw ContractError("verify_prop1: bad size bounds");
  Prop1Report r;
  r.trials.resize(trials);
  const auto n = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    r.trials[static_cast<std::size_t>(i)] =
        run_prop1_trial(min_nodes, max_nodes, trial_seed(seed, static_cast<std::uint64_t>(i)), tolerance);
  }
  return r;
}

}  // namespace ghg
