// Proof extraction from a computed closure.
//
// A proof assigns every atom it needs exactly one support (a fact, or one rule
// instance whose consequent is that atom) and uses each rule with a single
// binding, so the projection onto sentence ids is a DAG. Facts are always
// preferred over rule derivations of the same atom.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "ruleproof/reasoner.hpp"

namespace ruleproof {

namespace {

constexpr std::size_t kMaxCandidates = 256;
constexpr std::size_t kMaxExpansions = 50000;

struct Support {
  int fact = 0;                          // fact index, or 0
  const RuleInstance* instance = nullptr;
};

class ProofSearch {
 public:
  ProofSearch(const Theory& t, const Closure& c) : t_(t), c_(c) {
    for (const auto& f : t.facts) fact_of_[f.literal] = f.index;
  }

  /// Enumerates supports for `goals`. `root`, when given, is a rule instance
  /// that is part of the proof but whose consequent needs no support (the
  /// failing rule of a failed proof).
  std::vector<ProofGraph> enumerate(const std::vector<Literal>& goals, const RuleInstance* root) {
    root_ = root;
    results_.clear();
    expansions_ = 0;
    support_.clear();
    bound_rules_.clear();
    if (root_) bound_rules_.insert(root_->rule);
    search(goals);
    return results_;
  }

 private:
  std::optional<int> fact_for(const Literal& l) const {
    auto it = fact_of_.find(l);
    if (it == fact_of_.end()) return std::nullopt;
    return it->second;
  }

  void search(std::vector<Literal> pending) {
    if (results_.size() >= kMaxCandidates || ++expansions_ > kMaxExpansions) return;
    while (!pending.empty() && support_.count(pending.back())) pending.pop_back();
    if (pending.empty()) {
      if (acyclic()) results_.push_back(to_graph());
      return;
    }
    Literal atom = pending.back();
    pending.pop_back();

    if (auto f = fact_for(atom)) {
      support_[atom] = Support{*f, nullptr};
      search(pending);
      support_.erase(atom);
      return;
    }
    auto it = c_.derivation_index.find(atom);
    if (it == c_.derivation_index.end()) return;
    for (const auto& inst : it->second) {
      if (bound_rules_.count(inst.rule)) continue;
      support_[atom] = Support{0, &inst};
      bound_rules_.insert(inst.rule);
      std::vector<Literal> next = pending;
      for (auto a = inst.antecedents.rbegin(); a != inst.antecedents.rend(); ++a)
        if (a->positive && !support_.count(*a)) next.push_back(*a);
      search(std::move(next));
      bound_rules_.erase(inst.rule);
      support_.erase(atom);
      if (results_.size() >= kMaxCandidates || expansions_ > kMaxExpansions) return;
    }
  }

  bool acyclic() const {
    enum class Mark { kNone, kActive, kDone };
    std::map<Literal, Mark> mark;
    std::function<bool(const Literal&)> visit = [&](const Literal& a) {
      Mark& m = mark[a];
      if (m == Mark::kDone) return true;
      if (m == Mark::kActive) return false;
      m = Mark::kActive;
      const Support& s = support_.at(a);
      if (s.instance) {
        for (const auto& ant : s.instance->antecedents)
          if (ant.positive && !visit(ant)) return false;
      }
      mark[a] = Mark::kDone;
      return true;
    };
    for (const auto& [atom, s] : support_)
      if (!visit(atom)) return false;
    return true;
  }

  ProofNode node_of(const Literal& atom) const {
    const Support& s = support_.at(atom);
    return s.instance ? ProofNode::rule(s.instance->rule) : ProofNode::fact(s.fact);
  }

  void add_instance_edges(const RuleInstance& inst, ProofGraph& g) const {
    const ProofNode target = ProofNode::rule(inst.rule);
    g.nodes.insert(target);
    for (const auto& a : inst.antecedents) {
      if (a.positive) {
        if (support_.count(a)) g.add_edge(node_of(a), target);
        else g.add_edge(ProofNode::naf(), target);  // failing antecedent of the root
      } else if (c_.derived.count(a.atom())) {
        g.add_edge(ProofNode::naf(), target);  // failing negative antecedent of the root
      } else if (auto f = fact_for(a)) {
        g.add_edge(ProofNode::fact(*f), target);
      } else {
        g.add_edge(ProofNode::naf(), target);
      }
    }
  }

  ProofGraph to_graph() const {
    ProofGraph g;
    for (const auto& [atom, s] : support_) {
      if (s.instance) add_instance_edges(*s.instance, g);
      else g.nodes.insert(ProofNode::fact(s.fact));
    }
    if (root_) add_instance_edges(*root_, g);
    return g;
  }

  const Theory& t_;
  const Closure& c_;
  std::map<Literal, int> fact_of_;
  std::map<Literal, Support> support_;
  std::set<int> bound_rules_;
  const RuleInstance* root_ = nullptr;
  std::vector<ProofGraph> results_;
  std::size_t expansions_ = 0;
};

// Keeps graphs that contain no other candidate as a proper subgraph.
std::vector<ProofGraph> minimal_sorted(std::vector<ProofGraph> candidates) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::vector<ProofGraph> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool minimal = true;
    for (std::size_t j = 0; j < candidates.size() && minimal; ++j)
      if (i != j && candidates[j].is_subgraph_of(candidates[i])) minimal = false;
    if (minimal) out.push_back(candidates[i]);
  }
  return out;
}

constexpr int kUnbounded = std::numeric_limits<int>::max() / 2;

// Failure depth of every underivable atom reachable from `goal` through
// concluding rule instances: 0 when nothing concludes the atom, otherwise
// 1 + the shallowest failing antecedent of its best instance.
class FailureDepths {
 public:
  FailureDepths(const Theory& t, const Closure& c) : t_(t), c_(c) {}

  int of_instance(const RuleInstance& inst) {
    int best = kUnbounded;
    for (const auto& a : inst.antecedents) {
      if (a.positive && !c_.derived.count(a)) best = std::min(best, depth_[a]);
      if (!a.positive && c_.derived.count(a.atom())) best = 0;
    }
    return best >= kUnbounded ? kUnbounded : 1 + best;
  }

  void solve(const Literal& goal) {
    std::vector<Literal> stack{goal};
    while (!stack.empty()) {
      Literal a = stack.back();
      stack.pop_back();
      if (instances_.count(a)) continue;
      auto& insts = instances_[a];
      for (const auto& r : t_.rules)
        for (auto& inst : concluding_instances(r, a, c_.domain)) insts.push_back(std::move(inst));
      depth_[a] = insts.empty() ? 0 : kUnbounded;
      for (const auto& inst : insts)
        for (const auto& ant : inst.antecedents)
          if (ant.positive && !c_.derived.count(ant) && !instances_.count(ant)) stack.push_back(ant);
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& [atom, insts] : instances_) {
        for (const auto& inst : insts) {
          const int d = of_instance(inst);
          if (d < depth_[atom]) {
            depth_[atom] = d;
            changed = true;
          }
        }
      }
    }
  }

  const std::vector<RuleInstance>& instances(const Literal& a) const { return instances_.at(a); }

 private:
  const Theory& t_;
  const Closure& c_;
  std::map<Literal, std::vector<RuleInstance>> instances_;
  std::map<Literal, int> depth_;
};

std::vector<ProofGraph> failed_proof(const Theory& t, const Closure& c, const Literal& goal) {
  FailureDepths depths(t, c);
  depths.solve(goal);
  std::vector<std::pair<int, const RuleInstance*>> ranked;
  for (const auto& inst : depths.instances(goal)) ranked.emplace_back(depths.of_instance(inst), &inst);
  if (ranked.empty()) return {ProofGraph::single(ProofNode::naf())};
  // stable on (depth, rule index, binding) since instances are built in rule/binding order
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  ProofSearch search(t, c);
  for (const auto& [depth, inst] : ranked) {
    std::vector<Literal> goals;
    for (auto a = inst->antecedents.rbegin(); a != inst->antecedents.rend(); ++a)
      if (a->positive && c.derived.count(*a)) goals.push_back(*a);
    auto found = search.enumerate(goals, inst);
    if (!found.empty()) return {*std::min_element(found.begin(), found.end())};
  }
  return {};
}

}  // namespace

std::vector<ProofGraph> prove(const Theory& t, const Question& q, int max_proofs) {
  if (max_proofs < 1) throw std::invalid_argument("max_proofs must be at least 1");
  std::set<std::string> extra;
  if (!is_variable(q.literal.subject)) extra.insert(q.literal.subject);
  if (q.literal.object) extra.insert(*q.literal.object);
  const Closure c = closure(t, extra);
  const Literal goal = q.literal.atom();

  std::vector<ProofGraph> proofs;
  if (c.derived.count(goal)) {
    for (const auto& f : t.facts)
      if (f.literal == goal) return {ProofGraph::single(f.node())};
    ProofSearch search(t, c);
    proofs = minimal_sorted(search.enumerate({goal}, nullptr));
  } else if (!q.literal.positive) {
    for (const auto& f : t.facts)
      if (f.literal == q.literal) return {ProofGraph::single(f.node())};
    return {ProofGraph::single(ProofNode::naf())};
  } else {
    proofs = failed_proof(t, c, goal);
  }
  if (proofs.size() > static_cast<std::size_t>(max_proofs)) proofs.resize(static_cast<std::size_t>(max_proofs));
  return proofs;
}

}  // namespace ruleproof
