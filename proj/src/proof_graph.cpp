#include "ruleproof/proof_graph.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "ruleproof/errors.hpp"

namespace ruleproof {

ProofNode ProofNode::parse(std::string_view id) {
  if (id == "NAF") return naf();
  if (id.size() >= 2 && (id[0] == 'F' || id[0] == 'R')) {
    int value = 0;
    bool ok = true;
    for (std::size_t i = 1; i < id.size(); ++i) {
      if (id[i] < '0' || id[i] > '9' || value > 100000) {
        ok = false;
        break;
      }
      value = value * 10 + (id[i] - '0');
    }
    if (ok && value >= 1) return id[0] == 'F' ? fact(value) : rule(value);
  }
  throw DataError("invalid proof node id '" + std::string(id) + "'");
}

std::string ProofNode::id() const {
  switch (kind) {
    case NodeKind::kFact: return "F" + std::to_string(index);
    case NodeKind::kRule: return "R" + std::to_string(index);
    case NodeKind::kNaf: return "NAF";
  }
  return "?";
}

bool ProofGraph::is_subgraph_of(const ProofGraph& other) const {
  return std::includes(other.nodes.begin(), other.nodes.end(), nodes.begin(), nodes.end()) &&
         std::includes(other.edges.begin(), other.edges.end(), edges.begin(), edges.end());
}

std::strong_ordering ProofGraph::operator<=>(const ProofGraph& other) const {
  if (auto c = std::lexicographical_compare_three_way(nodes.begin(), nodes.end(), other.nodes.begin(),
                                                      other.nodes.end());
      c != 0)
    return c;
  return std::lexicographical_compare_three_way(edges.begin(), edges.end(), other.edges.begin(), other.edges.end());
}

namespace {

std::string edge_name(const ProofEdge& e) { return e.first.id() + "->" + e.second.id(); }

}  // namespace

bool is_connected_undirected(const ProofGraph& p) {
  if (p.nodes.empty()) return false;
  std::map<ProofNode, ProofNode> parent;
  for (const auto& n : p.nodes) parent[n] = n;
  auto find = [&](ProofNode n) {
    while (!(parent[n] == n)) {
      parent[n] = parent[parent[n]];
      n = parent[n];
    }
    return n;
  };
  std::size_t components = p.nodes.size();
  for (const auto& [a, b] : p.edges) {
    if (!p.contains(a) || !p.contains(b)) continue;
    ProofNode ra = find(a), rb = find(b);
    if (!(ra == rb)) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

std::vector<StructureViolation> validate_structure(const ProofGraph& p) {
  std::vector<StructureViolation> out;
  if (p.nodes.empty()) {
    out.push_back({StructureViolationKind::kEmpty, "", "proof has no nodes"});
    return out;
  }
  for (const auto& e : p.edges) {
    const auto& [from, to] = e;
    if (!p.contains(from) || !p.contains(to)) {
      out.push_back({StructureViolationKind::kDanglingEdge, edge_name(e), "edge endpoint is not a proof node"});
      continue;
    }
    if (from == to) {
      out.push_back({StructureViolationKind::kSelfLoop, edge_name(e), "self-loop"});
      continue;
    }
    if (!to.is_rule())
      out.push_back({StructureViolationKind::kIllegalEdgeType, edge_name(e),
                     to.is_fact() ? "edges may not end at a fact" : "edges may not end at NAF"});
  }
  if (!is_connected_undirected(p))
    out.push_back({StructureViolationKind::kDisconnected, "", "proof is not connected when directions are ignored"});
  return out;
}

ProofMatch match_proofs(const ProofGraph& pred, const std::vector<ProofGraph>& golds) {
  if (golds.empty()) throw DataError("match_proofs needs at least one gold proof");
  ProofMatch m;
  for (const auto& g : golds) {
    const bool nodes_equal = pred.nodes == g.nodes;
    const bool edges_equal = pred.edges == g.edges;
    m.node_match = m.node_match || nodes_equal;
    m.edge_match = m.edge_match || edges_equal;
    m.proof_match = m.proof_match || (nodes_equal && edges_equal);
  }
  return m;
}

std::string to_dot(const ProofGraph& p, const std::string& name,
                   const std::vector<std::pair<ProofNode, std::string>>& labels) {
  auto escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out;
  };
  std::map<ProofNode, std::string> label_of(labels.begin(), labels.end());
  std::ostringstream os;
  os << "digraph \"" << escape(name) << "\" {\n";
  os << "  rankdir=LR;\n";
  for (const auto& n : p.nodes) {
    const char* shape = n.is_fact() ? "box" : n.is_rule() ? "ellipse" : "diamond";
    os << "  \"" << n.id() << "\" [shape=" << shape;
    if (auto it = label_of.find(n); it != label_of.end() && !it->second.empty())
      os << ", label=\"" << n.id() << ": " << escape(it->second) << "\"";
    os << "];\n";
  }
  for (const auto& [from, to] : p.edges) os << "  \"" << from.id() << "\" -> \"" << to.id() << "\";\n";
  os << "}\n";
  return os.str();
}

}  // namespace ruleproof
