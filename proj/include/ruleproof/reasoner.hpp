#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ruleproof/errors.hpp"
#include "ruleproof/proof_graph.hpp"
#include "ruleproof/theory.hpp"

namespace ruleproof {

/// A rule has a cycle through a negative antecedent at the predicate level.
class NonStratifiedTheory : public DataError {
 public:
  using DataError::DataError;
};

/// Fixpoint iteration exceeded |rules| x |ground literal space| sweeps.
class IterationBoundExceeded : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

/// One ground application of a rule: the binding of its variable (if any)
/// and its antecedents instantiated under that binding.
struct RuleInstance {
  int rule = 0;                         // rule index (R<rule>)
  std::optional<std::string> binding;   // entity bound to the rule's variable
  std::vector<Literal> antecedents;     // ground, with original polarity
  Literal consequent;                   // ground

  auto operator<=>(const RuleInstance&) const = default;
};

/// Perfect model of a stratified theory.
struct Closure {
  std::set<Literal> derived;  // ground positive literals
  /// Every rule instance whose antecedents hold in the final model, keyed by
  /// its consequent. Instances are sorted by (rule, binding).
  std::map<Literal, std::vector<RuleInstance>> derivation_index;
  std::size_t iteration_count = 0;

  std::set<std::string> domain;     // entities a variable ranges over
  std::set<Literal> negative_facts; // explicit negative facts, as given

  bool holds(const Literal& ground) const;  // positive: in model; negative: CWA
};

/// Least fixpoint, stratum by stratum. Variables range over every entity that
/// appears in the theory's facts, rules and questions plus `extra_entities`.
Closure closure(const Theory& t, const std::set<std::string>& extra_entities = {});

/// Closed-world truth of the question literal.
bool answer_question(const Theory& t, const Question& q);
bool answer_question(const Theory& t, const Closure& c, const Literal& q);

inline constexpr int kDefaultMaxProofs = 10;

/// Minimal proofs of `q`, canonically ordered, at most `max_proofs`.
/// Throws std::invalid_argument when max_proofs < 1.
std::vector<ProofGraph> prove(const Theory& t, const Question& q, int max_proofs = kDefaultMaxProofs);

/// Rule nodes on the longest directed path; 0 for single-node proofs.
/// Throws DataError on an empty graph.
int proof_depth(const ProofGraph& p);

/// Ids ("F3", "R1") of sentences whose individual removal flips the answer.
std::set<std::string> critical_sentences(const Theory& t, const Question& q);

/// Returns the rule instances for `rule` whose consequent unifies with the
/// ground `atom`, one per admissible binding, in binding order.
std::vector<RuleInstance> concluding_instances(const Rule& rule, const Literal& atom,
                                               const std::set<std::string>& domain);

/// Ground `rule` under `binding` (ignored for ground rules).
RuleInstance instantiate(const Rule& rule, const std::optional<std::string>& binding);

/// Entities mentioned anywhere in the theory (facts, rules, questions).
std::set<std::string> theory_entities(const Theory& t);

}  // namespace ruleproof
