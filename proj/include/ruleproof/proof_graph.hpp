#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ruleproof {

struct Theory;
struct Question;

enum class NodeKind : std::uint8_t { kFact, kRule, kNaf };

/// A proof node: fact F<i>, rule R<i>, or the single collapsed NAF node.
/// Ordering is facts, then rules, then NAF, each by index.
struct ProofNode {
  NodeKind kind = NodeKind::kFact;
  int index = 0;  // 1-based for facts and rules, 0 for NAF

  static ProofNode fact(int i) { return {NodeKind::kFact, i}; }
  static ProofNode rule(int i) { return {NodeKind::kRule, i}; }
  static ProofNode naf() { return {NodeKind::kNaf, 0}; }

  /// Parses "F<i>", "R<i>" or "NAF"; throws DataError otherwise.
  static ProofNode parse(std::string_view id);

  std::string id() const;
  bool is_fact() const { return kind == NodeKind::kFact; }
  bool is_rule() const { return kind == NodeKind::kRule; }
  bool is_naf() const { return kind == NodeKind::kNaf; }

  auto operator<=>(const ProofNode&) const = default;
};

using ProofEdge = std::pair<ProofNode, ProofNode>;

/// Directed proof graph with set semantics; iteration order is canonical.
struct ProofGraph {
  std::set<ProofNode> nodes;
  std::set<ProofEdge> edges;

  static ProofGraph single(ProofNode n) {
    ProofGraph g;
    g.nodes.insert(n);
    return g;
  }

  void add_edge(ProofNode from, ProofNode to) {
    nodes.insert(from);
    nodes.insert(to);
    edges.emplace(from, to);
  }

  bool contains(ProofNode n) const { return nodes.count(n) != 0; }
  bool has_naf() const { return contains(ProofNode::naf()); }

  /// True when this graph's nodes and edges are subsets of `other`'s.
  bool is_subgraph_of(const ProofGraph& other) const;

  bool operator==(const ProofGraph&) const = default;
  /// Lexicographic on the canonical node list, then the canonical edge list.
  std::strong_ordering operator<=>(const ProofGraph& other) const;
};

enum class StructureViolationKind {
  kEmpty,
  kDanglingEdge,
  kSelfLoop,
  kIllegalEdgeType,
  kDisconnected,
};

struct StructureViolation {
  StructureViolationKind kind;
  std::string where;  // offending node or edge, e.g. "F1->F2"
  std::string message;
};

/// Checks node/edge typing, dangling endpoints, self-loops and undirected
/// connectivity. Empty result means the graph is a well-formed proof.
std::vector<StructureViolation> validate_structure(const ProofGraph& p);

/// Undirected connectivity over the node set. The empty graph is not connected.
bool is_connected_undirected(const ProofGraph& p);

struct ProofMatch {
  bool node_match = false;
  bool edge_match = false;
  bool proof_match = false;
};

/// Exact-match comparison with any-gold credit applied per metric.
/// Throws DataError when `golds` is empty.
ProofMatch match_proofs(const ProofGraph& pred, const std::vector<ProofGraph>& golds);

/// Whether `p` is a correct derivation (or declared failed-proof shape) for
/// `q` against theory `t`. Throws DataError on node ids unknown to `t`.
bool verify_derivation(const Theory& t, const Question& q, const ProofGraph& p);

/// DOT rendering of a proof; `labels` attaches sentence text to nodes.
std::string to_dot(const ProofGraph& p, const std::string& name,
                   const std::vector<std::pair<ProofNode, std::string>>& labels = {});

}  // namespace ruleproof
