#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ruleproof/errors.hpp"
#include "ruleproof/jsonl.hpp"
#include "ruleproof/potentials.hpp"
#include "ruleproof/proof_graph.hpp"

namespace ruleproof {

/// The selected node set cannot be joined by admissible edges.
class ConnectivityInfeasible : public DataError {
 public:
  using DataError::DataError;
};

/// Node indices (NodeLayout order) with probability >= 0.5; the lowest-index
/// argmax when none qualifies. Sorted ascending.
std::vector<int> select_nodes(const std::vector<double>& node_prob);

using IndexPair = std::pair<int, int>;

/// Edge-selection problem over a fixed node set. Flow variables are kept
/// implicit: connectivity is checked combinatorially and certified by an
/// explicit flow (see FlowCertificate).
struct IlpInstance {
  NodeLayout layout;
  std::vector<int> present;          // selected node indices, ascending
  int anchor = 0;                    // receives the source flow
  std::vector<IndexPair> edge_vars;  // admissible ordered pairs, ascending
  std::vector<double> phi;           // phi[k] belongs to edge_vars[k]

  static IlpInstance build(const Potentials& p, std::vector<int> present);

  /// Capacity of an arc of the augmented graph. Node ids are layout indices,
  /// kSource and kSink the two extra vertices.
  static constexpr int kSource = -1;
  static constexpr int kSink = -2;
  double capacity(int from, int to) const;

  /// Sum over edge_vars of phi*e + (1-phi)*(1-e) for the chosen edges.
  double objective(const std::vector<IndexPair>& chosen) const;
};

/// Flow of value |N| from source to sink: source->anchor carries |N|, every
/// present node sends 1 to the sink, and node-to-node flow runs along edges.
struct FlowCertificate {
  int anchor = 0;
  double value = 0;
  std::map<IndexPair, double> flow;  // between present nodes only
};

/// Routes one unit from the anchor to every node along a BFS spanning tree of
/// the undirected edge set. Empty when the edge set is disconnected.
std::optional<FlowCertificate> build_flow_certificate(const IlpInstance& inst, const std::vector<IndexPair>& edges);

/// Checks capacities, conservation, source saturation and the coupling
/// e(m,n) + e(n,m) >= f(m,n)/|N|, to within 1e-9.
bool verify_flow_certificate(const IlpInstance& inst, const std::vector<IndexPair>& edges, const FlowCertificate& c);

struct SolverStats {
  std::size_t components = 0;    // before repair
  std::size_t repair_edges = 0;
  std::size_t pairs_examined = 0;
  double elapsed_ms = 0;
};

struct DecodeResult {
  ProofGraph proof;
  double objective = 0;
  bool optimal = false;
  bool connectivity_relaxed = false;
  SolverStats stats;
  std::optional<FlowCertificate> certificate;
};

struct DecodeOptions {
  bool connectivity = true;
};

/// Exact edge decoding over the selected nodes. With connectivity on, throws
/// ConnectivityInfeasible when no admissible edge set connects the nodes.
DecodeResult decode_proof(const Potentials& p, const DecodeOptions& options = {});

/// decode_proof, re-run without connectivity (and flagged) when infeasible.
DecodeResult decode_with_fallback(const Potentials& p, const DecodeOptions& options = {});

/// Ablation decoder: e=1 iff phi>0.5 over every ordered pair i != j, with no
/// typing, node or connectivity constraints. Nodes are the selected nodes
/// plus every edge endpoint.
DecodeResult decode_unconstrained(const Potentials& p);

/// `.predictions.jsonl` record.
Json prediction_record(const std::string& theory_id, const std::string& question_id, bool answer,
                       const DecodeResult& r);

}  // namespace ruleproof
