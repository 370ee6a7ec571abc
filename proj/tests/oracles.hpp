#pragma once

// Independent reference implementations used only by tests. Nothing here
// calls into the reasoner or decoder code paths it is used to check.

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ruleproof/potentials.hpp"
#include "ruleproof/proof_graph.hpp"
#include "ruleproof/theory.hpp"

namespace ruleproof::oracle {

/// Ground atom as a flat tuple, independent of the library's Literal handling.
struct Atom {
  std::string subject, predicate, object;  // object empty for attributes
  auto operator<=>(const Atom&) const = default;
};

/// Alternating-fixpoint (well-founded) evaluation by naive repeated rule
/// application. For stratified programs the lower and upper bounds coincide;
/// `total` reports whether they did.
struct Model {
  std::set<Atom> true_atoms;
  bool total = true;
};
Model brute_force_model(const Theory& t, const std::set<std::string>& extra_entities = {});

/// Closed-world answer computed from brute_force_model.
bool brute_force_answer(const Theory& t, const Literal& q);

/// Node sets ({F.., R..}) of inclusion-minimal sentence subsets from which
/// `q` is derivable. Exponential; intended for theories of <= 8 sentences.
std::vector<std::set<ProofNode>> minimal_support_sets(const Theory& t, const Literal& q);

/// Rule nodes on the longest directed simple path, by enumerating every path.
int longest_path_rules(const ProofGraph& p);

/// Random small theory over a tiny vocabulary; may be non-stratified.
struct RandomTheorySpec {
  int max_facts = 6;
  int max_rules = 6;
  double negation_rate = 0.3;
  double relation_rate = 0.2;
};
Theory random_theory(std::mt19937_64& rng, const RandomTheorySpec& spec = {});

/// Every ground literal over the theory's entities and predicates.
std::vector<Literal> all_ground_literals(const Theory& t);

/// Exhaustive edge decoding over `nodes` (layout indices). Admissible pairs
/// are recomputed here from the layout: distinct endpoints, rule target.
/// Among maximal assignments the one with fewest edges, then the
/// lexicographically smallest sorted edge list, is returned.
struct DecodeOptimum {
  bool feasible = false;
  double objective = 0;
  std::vector<std::pair<int, int>> edges;
};
/// Enumerates every subset of ordered pairs; keep to <= 14 pairs.
DecodeOptimum brute_force_decode_full(const Potentials& p, const std::vector<int>& nodes, bool connectivity);
/// Enumerates subsets of unordered pairs, resolving each used pair to its
/// best orientation(s); exact because connectivity ignores direction.
DecodeOptimum brute_force_decode(const Potentials& p, const std::vector<int>& nodes, bool connectivity);

/// Random potentials over a random layout with at most `max_nodes` selected
/// nodes; `nodes` is the selection select_nodes should make. `sparse` pushes
/// most phi below 0.5 so that unconstrained optima are often disconnected.
struct RandomInstance {
  Potentials p;
  std::vector<int> nodes;
};
RandomInstance random_instance(std::mt19937_64& rng, int max_nodes, bool sparse);

}  // namespace ruleproof::oracle
