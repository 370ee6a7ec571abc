// Exact edge decoding for a fixed node set.
//
// The objective is separable over edge variables, so without connectivity the
// optimum keeps exactly the pairs with phi > 0.5. Forcing a 0-preferring pair
// to 1 costs 1 - 2*phi >= 0 and can only merge components, so the cheapest
// connected completion is a minimum spanning tree over the components of the
// unconstrained optimum. Kruskal on (cost, pair) yields it.

#include "ruleproof/decoder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

namespace ruleproof {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
};

double phi_at(const Potentials& p, int i, int j) {
  return p.edge_prob[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

ProofGraph to_proof(const NodeLayout& layout, const std::vector<int>& nodes, const std::vector<IndexPair>& edges) {
  ProofGraph g;
  for (int n : nodes) g.nodes.insert(layout.node_at(n));
  for (const auto& [a, b] : edges) g.add_edge(layout.node_at(a), layout.node_at(b));
  return g;
}

std::size_t count_components(const std::vector<int>& nodes, const std::vector<IndexPair>& edges, int k) {
  DisjointSets ds(k);
  for (const auto& [a, b] : edges) ds.unite(a, b);
  std::set<int> roots;
  for (int n : nodes) roots.insert(ds.find(n));
  return roots.size();
}

}  // namespace

std::vector<int> select_nodes(const std::vector<double>& node_prob) {
  std::vector<int> out;
  for (std::size_t i = 0; i < node_prob.size(); ++i)
    if (node_prob[i] >= 0.5) out.push_back(static_cast<int>(i));
  if (out.empty() && !node_prob.empty()) {
    const auto best = std::max_element(node_prob.begin(), node_prob.end());  // first maximum
    out.push_back(static_cast<int>(best - node_prob.begin()));
  }
  return out;
}

IlpInstance IlpInstance::build(const Potentials& p, std::vector<int> present) {
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  if (present.empty()) throw InvariantError("ILP instance with no nodes");
  IlpInstance inst;
  inst.layout = p.layout;
  inst.present = std::move(present);
  inst.anchor = inst.present.front();
  for (int i : inst.present) {
    for (int j : inst.present) {
      if (!edge_type_allowed(inst.layout, i, j)) continue;
      inst.edge_vars.emplace_back(i, j);
      inst.phi.push_back(phi_at(p, i, j));
    }
  }
  return inst;
}

double IlpInstance::capacity(int from, int to) const {
  const double n = static_cast<double>(present.size());
  auto in_n = [&](int x) { return std::binary_search(present.begin(), present.end(), x); };
  if (from == kSource) return to == anchor ? n : 0.0;
  if (to == kSink) return in_n(from) ? 1.0 : 0.0;
  if (from == kSink || to == kSource) return 0.0;
  return (from != to && in_n(from) && in_n(to)) ? n : 0.0;
}

double IlpInstance::objective(const std::vector<IndexPair>& chosen) const {
  std::set<IndexPair> on(chosen.begin(), chosen.end());
  double total = 0;
  for (std::size_t k = 0; k < edge_vars.size(); ++k) total += on.count(edge_vars[k]) ? phi[k] : 1.0 - phi[k];
  return total;
}

std::optional<FlowCertificate> build_flow_certificate(const IlpInstance& inst, const std::vector<IndexPair>& edges) {
  std::map<int, std::vector<int>> adj;
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& [n, nbrs] : adj) std::sort(nbrs.begin(), nbrs.end());
  std::map<int, int> parent{{inst.anchor, inst.anchor}};
  std::vector<int> order;
  std::queue<int> frontier;
  frontier.push(inst.anchor);
  while (!frontier.empty()) {
    const int n = frontier.front();
    frontier.pop();
    order.push_back(n);
    for (int m : adj[n])
      if (parent.emplace(m, n).second) frontier.push(m);
  }
  if (order.size() != inst.present.size()) return std::nullopt;

  std::map<int, double> subtree;
  for (int n : inst.present) subtree[n] = 1.0;
  FlowCertificate c;
  c.anchor = inst.anchor;
  c.value = static_cast<double>(inst.present.size());
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int n = *it;
    if (n == inst.anchor) continue;
    c.flow[{parent[n], n}] = subtree[n];
    subtree[parent[n]] += subtree[n];
  }
  return c;
}

bool verify_flow_certificate(const IlpInstance& inst, const std::vector<IndexPair>& edges, const FlowCertificate& c) {
  constexpr double kTol = 1e-9;
  const double n = static_cast<double>(inst.present.size());
  if (c.anchor != inst.anchor || std::abs(c.value - n) > kTol) return false;
  if (inst.capacity(IlpInstance::kSource, c.anchor) + kTol < c.value) return false;
  std::set<IndexPair> on(edges.begin(), edges.end());
  std::map<int, double> balance;  // inflow - outflow over node-to-node arcs
  for (const auto& [arc, f] : c.flow) {
    const auto [a, b] = arc;
    if (f < -kTol || f > inst.capacity(a, b) + kTol) return false;
    const double coupled = (on.count({a, b}) ? 1.0 : 0.0) + (on.count({b, a}) ? 1.0 : 0.0);
    if (coupled + kTol < f / n) return false;
    balance[a] -= f;
    balance[b] += f;
  }
  for (int node : inst.present) {
    const double source_in = node == c.anchor ? c.value : 0.0;
    const double sink_out = 1.0;  // saturates c(node, sink) = 1
    if (sink_out > inst.capacity(node, IlpInstance::kSink) + kTol) return false;
    if (std::abs(source_in + balance[node] - sink_out) > kTol) return false;
  }
  for (const auto& [node, b] : balance)
    if (!std::binary_search(inst.present.begin(), inst.present.end(), node)) return false;
  return true;
}

DecodeResult decode_proof(const Potentials& p, const DecodeOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  p.validate();
  const IlpInstance inst = IlpInstance::build(p, select_nodes(p.node_prob));
  const int k = p.layout.size();

  DecodeResult r;
  std::vector<IndexPair> chosen;
  std::vector<std::pair<double, IndexPair>> candidates;
  for (std::size_t v = 0; v < inst.edge_vars.size(); ++v) {
    if (inst.phi[v] > 0.5) chosen.push_back(inst.edge_vars[v]);
    else candidates.emplace_back(1.0 - 2.0 * inst.phi[v], inst.edge_vars[v]);
  }
  r.stats.components = count_components(inst.present, chosen, k);

  if (options.connectivity && r.stats.components > 1) {
    DisjointSets ds(k);
    for (const auto& [a, b] : chosen) ds.unite(a, b);
    std::sort(candidates.begin(), candidates.end());
    std::size_t components = r.stats.components;
    for (const auto& [cost, pair] : candidates) {
      ++r.stats.pairs_examined;
      if (!ds.unite(pair.first, pair.second)) continue;
      chosen.push_back(pair);
      ++r.stats.repair_edges;
      if (--components == 1) break;
    }
    if (components > 1)
      throw ConnectivityInfeasible("no admissible edges connect the " + std::to_string(inst.present.size()) +
                                   " selected nodes");
    std::sort(chosen.begin(), chosen.end());
  }

  r.proof = to_proof(p.layout, inst.present, chosen);
  r.objective = inst.objective(chosen);
  r.optimal = true;
  if (options.connectivity) {
    r.certificate = build_flow_certificate(inst, chosen);
    if (!r.certificate || !verify_flow_certificate(inst, chosen, *r.certificate))
      throw InvariantError("decoded proof has no valid flow certificate");
  }
  r.stats.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return r;
}

DecodeResult decode_with_fallback(const Potentials& p, const DecodeOptions& options) {
  try {
    return decode_proof(p, options);
  } catch (const ConnectivityInfeasible&) {
    DecodeResult r = decode_proof(p, DecodeOptions{false});
    r.connectivity_relaxed = true;
    return r;
  }
}

DecodeResult decode_unconstrained(const Potentials& p) {
  p.validate();
  const int k = p.layout.size();
  std::vector<int> nodes = select_nodes(p.node_prob);
  std::vector<IndexPair> chosen;
  DecodeResult r;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const double phi = phi_at(p, i, j);
      if (phi > 0.5) {
        chosen.emplace_back(i, j);
        r.objective += phi;
      } else {
        r.objective += 1.0 - phi;
      }
    }
  }
  r.proof = to_proof(p.layout, nodes, chosen);
  r.optimal = true;
  r.stats.components = count_components(nodes, chosen, k);
  return r;
}

Json prediction_record(const std::string& theory_id, const std::string& question_id, bool answer,
                       const DecodeResult& r) {
  const Json proof = to_json(r.proof);
  Json j;
  j["theory_id"] = theory_id;
  j["question_id"] = question_id;
  j["answer"] = answer;
  j["nodes"] = proof["nodes"];
  j["edges"] = proof["edges"];
  j["objective"] = r.objective;
  j["connectivity_relaxed"] = r.connectivity_relaxed;
  return j;
}

}  // namespace ruleproof
