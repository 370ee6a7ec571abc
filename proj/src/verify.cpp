#include <algorithm>
#include <functional>
#include <map>

#include "ruleproof/proof_graph.hpp"
#include "ruleproof/reasoner.hpp"
#include "ruleproof/theory.hpp"

namespace ruleproof {

namespace {

// Checks a multi-node proof whose single sink concludes `goal` (or, when
// `failed`, is a concluding rule that fails with its failing antecedents
// represented by NAF). Each rule node gets one binding; the search walks rule
// nodes from the sink backwards so consumers constrain producers.
class DerivationChecker {
 public:
  DerivationChecker(const Theory& t, const Closure& c, const ProofGraph& p, const Literal& goal, bool failed)
      : t_(t), c_(c), p_(p), goal_(goal), failed_(failed) {
    for (const auto& [a, b] : p.edges) {
      in_[b].push_back(a);
      out_[a].push_back(b);
    }
  }

  bool run() {
    std::vector<ProofNode> sinks;
    for (const auto& n : p_.nodes)
      if (out_[n].empty()) sinks.push_back(n);
    if (sinks.size() != 1 || !sinks[0].is_rule()) return false;
    sink_ = sinks[0];
    if (!topological_rules()) return false;
    return assign(0);
  }

 private:
  const Rule& rule(const ProofNode& n) const { return *t_.find_rule(n.index); }

  // Rule nodes ordered so every consumer precedes its producers.
  bool topological_rules() {
    std::map<ProofNode, int> pending_out;
    for (const auto& n : p_.nodes) pending_out[n] = static_cast<int>(out_[n].size());
    std::vector<ProofNode> ready{sink_};
    std::size_t visited = 0;
    while (!ready.empty()) {
      ProofNode n = ready.back();
      ready.pop_back();
      ++visited;
      if (n.is_rule()) order_.push_back(n);
      for (const auto& src : in_[n])
        if (--pending_out[src] == 0) ready.push_back(src);
    }
    return visited == p_.nodes.size();
  }

  std::vector<std::optional<std::string>> candidates(const ProofNode& n) const {
    const Rule& r = rule(n);
    std::vector<std::optional<std::string>> all;
    if (r.variable()) {
      for (const auto& e : c_.domain) all.emplace_back(e);
    } else {
      all.emplace_back(std::nullopt);
    }
    std::vector<std::optional<std::string>> out;
    for (const auto& b : all) {
      RuleInstance inst = instantiate(r, b);
      bool ok = true;
      if (n == sink_) {
        ok = inst.consequent == goal_;
      } else {
        for (const auto& consumer : out_.at(n)) {
          const auto& ants = bound_.at(consumer).antecedents;
          if (std::find(ants.begin(), ants.end(), inst.consequent) == ants.end()) {
            ok = false;
            break;
          }
        }
      }
      if (ok) out.push_back(b);
    }
    return out;
  }

  bool assign(std::size_t i) {
    if (i == order_.size()) return coverage_ok();
    const ProofNode& n = order_[i];
    for (const auto& b : candidates(n)) {
      bound_[n] = instantiate(rule(n), b);
      if (assign(i + 1)) return true;
    }
    bound_.erase(n);
    return false;
  }

  bool supplies(const ProofNode& src, const Literal& need) const {
    if (src.is_fact()) return t_.find_fact(src.index)->literal == need;
    if (src.is_rule()) return bound_.at(src).consequent == need;
    return false;
  }

  bool coverage_ok() const {
    for (const auto& n : order_) {
      const RuleInstance& inst = bound_.at(n);
      const bool failing_root = failed_ && n == sink_;
      auto it = in_.find(n);
      const std::vector<ProofNode> sources = it == in_.end() ? std::vector<ProofNode>{} : it->second;
      std::set<ProofNode> used;
      const bool has_naf = std::find(sources.begin(), sources.end(), ProofNode::naf()) != sources.end();
      bool any_failing = false;
      for (const auto& a : inst.antecedents) {
        const bool satisfied = c_.holds(a);
        if (!satisfied) {
          if (!failing_root || !has_naf) return false;
          any_failing = true;
          used.insert(ProofNode::naf());
          continue;
        }
        bool found = false;
        for (const auto& src : sources) {
          if (supplies(src, a) || (!a.positive && src.is_naf())) {
            used.insert(src);
            found = true;
          }
        }
        if (!found) return false;
      }
      if (failing_root && !any_failing) return false;
      if (used.size() != std::set<ProofNode>(sources.begin(), sources.end()).size()) return false;
    }
    return true;
  }

  const Theory& t_;
  const Closure& c_;
  const ProofGraph& p_;
  Literal goal_;
  bool failed_;
  ProofNode sink_;
  std::map<ProofNode, std::vector<ProofNode>> in_, out_;
  std::vector<ProofNode> order_;
  std::map<ProofNode, RuleInstance> bound_;
};

}  // namespace

bool verify_derivation(const Theory& t, const Question& q, const ProofGraph& p) {
  for (const auto& n : p.nodes) {
    if ((n.is_fact() && !t.find_fact(n.index)) || (n.is_rule() && !t.find_rule(n.index)))
      throw DataError("proof node " + n.id() + " is not in theory " + t.id);
  }
  if (!validate_structure(p).empty()) return false;

  std::set<std::string> extra;
  if (!is_variable(q.literal.subject)) extra.insert(q.literal.subject);
  if (q.literal.object) extra.insert(*q.literal.object);
  const Closure c = closure(t, extra);
  const Literal goal = q.literal.atom();

  auto single_fact_with = [&](const Literal& l) {
    if (p.nodes.size() != 1 || !p.nodes.begin()->is_fact()) return false;
    return t.find_fact(p.nodes.begin()->index)->literal == l;
  };
  const ProofGraph bare_naf = ProofGraph::single(ProofNode::naf());

  if (c.derived.count(goal)) {
    if (p.nodes.size() == 1) return single_fact_with(goal);
    return DerivationChecker(t, c, p, goal, false).run();
  }
  if (!q.literal.positive) return p == bare_naf || single_fact_with(q.literal);

  bool concluded = false;
  for (const auto& r : t.rules)
    if (!concluding_instances(r, goal, c.domain).empty()) concluded = true;
  if (!concluded) return p == bare_naf;
  if (p.nodes.size() == 1) return false;
  return DerivationChecker(t, c, p, goal, true).run();
}

}  // namespace ruleproof
