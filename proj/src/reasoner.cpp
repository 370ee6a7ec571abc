#include "ruleproof/reasoner.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace ruleproof {

namespace {

Literal substitute(const Literal& l, const std::optional<std::string>& binding) {
  Literal out = l;
  if (binding) {
    if (is_variable(out.subject)) out.subject = *binding;
    if (out.object && is_variable(*out.object)) out.object = *binding;
  }
  return out;
}

// Predicate-level strata: a consequent sits at least as high as its positive
// antecedents and strictly above its negative ones.
std::map<std::string, int> stratify(const std::vector<Rule>& rules) {
  std::map<std::string, int> stratum;
  for (const auto& r : rules) {
    stratum.emplace(r.consequent.predicate, 0);
    for (const auto& a : r.antecedents) stratum.emplace(a.predicate, 0);
  }
  const int limit = static_cast<int>(stratum.size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : rules) {
      int& head = stratum[r.consequent.predicate];
      for (const auto& a : r.antecedents) {
        const int need = stratum[a.predicate] + (a.positive ? 0 : 1);
        if (head < need) {
          head = need;
          changed = true;
          if (head > limit)
            throw NonStratifiedTheory("rule " + r.id() + " depends negatively on '" + a.predicate +
                                      "' through a cycle");
        }
      }
    }
  }
  return stratum;
}

std::vector<std::optional<std::string>> bindings_for(const Rule& r, const std::set<std::string>& domain) {
  if (!r.variable()) return {std::nullopt};
  std::vector<std::optional<std::string>> out;
  out.reserve(domain.size());
  for (const auto& e : domain) out.emplace_back(e);
  return out;
}

bool antecedents_hold(const RuleInstance& inst, const std::set<Literal>& model) {
  for (const auto& a : inst.antecedents) {
    const bool present = model.count(a.atom()) != 0;
    if (present != a.positive) return false;
  }
  return true;
}

void add_entities(const Literal& l, std::set<std::string>& out) {
  if (!is_variable(l.subject)) out.insert(l.subject);
  if (l.object && !is_variable(*l.object)) out.insert(*l.object);
}

std::set<std::string> literal_entities(const Literal& l) {
  std::set<std::string> out;
  add_entities(l, out);
  return out;
}

}  // namespace

bool Closure::holds(const Literal& ground) const {
  const bool present = derived.count(ground.atom()) != 0;
  return ground.positive ? present : !present;
}

std::set<std::string> theory_entities(const Theory& t) {
  std::set<std::string> out;
  for (const auto& f : t.facts) add_entities(f.literal, out);
  for (const auto& r : t.rules) {
    for (const auto& a : r.antecedents) add_entities(a, out);
    add_entities(r.consequent, out);
  }
  for (const auto& q : t.questions) add_entities(q.literal, out);
  return out;
}

RuleInstance instantiate(const Rule& rule, const std::optional<std::string>& binding) {
  RuleInstance inst;
  inst.rule = rule.index;
  if (rule.variable()) inst.binding = binding;
  inst.antecedents.reserve(rule.antecedents.size());
  for (const auto& a : rule.antecedents) inst.antecedents.push_back(substitute(a, inst.binding));
  inst.consequent = substitute(rule.consequent, inst.binding);
  return inst;
}

std::vector<RuleInstance> concluding_instances(const Rule& rule, const Literal& atom,
                                               const std::set<std::string>& domain) {
  std::vector<RuleInstance> out;
  const Literal& head = rule.consequent;
  if (head.predicate != atom.predicate || head.is_relation() != atom.is_relation()) return out;
  if (auto var = head.variable()) {
    std::optional<std::string> binding;
    if (is_variable(head.subject)) binding = atom.subject;
    else if (head.object && is_variable(*head.object)) binding = *atom.object;
    RuleInstance inst = instantiate(rule, binding);
    if (inst.consequent == atom.atom()) out.push_back(std::move(inst));
    return out;
  }
  if (head != atom.atom()) return out;
  for (const auto& b : bindings_for(rule, domain)) out.push_back(instantiate(rule, b));
  return out;
}

Closure closure(const Theory& t, const std::set<std::string>& extra_entities) {
  Closure c;
  c.domain = theory_entities(t);
  c.domain.insert(extra_entities.begin(), extra_entities.end());
  for (const auto& f : t.facts) {
    if (f.literal.positive) c.derived.insert(f.literal);
    else c.negative_facts.insert(f.literal);
  }

  const auto stratum = stratify(t.rules);
  int top = 0;
  std::size_t attributes = 0, relations = 0;
  for (const auto& [pred, s] : stratum) top = std::max(top, s);
  {
    std::set<std::string> attr, rel;
    auto note = [&](const Literal& l) { (l.is_relation() ? rel : attr).insert(l.predicate); };
    for (const auto& f : t.facts) note(f.literal);
    for (const auto& r : t.rules) {
      note(r.consequent);
      for (const auto& a : r.antecedents) note(a);
    }
    attributes = attr.size();
    relations = rel.size();
  }
  const std::size_t n = c.domain.size();
  const std::size_t literal_space = n * attributes + n * n * relations;
  // one sweep per stratum always runs; every further sweep adds a literal
  const std::size_t bound = t.rules.size() * literal_space + static_cast<std::size_t>(top) + 1;

  std::vector<std::vector<std::optional<std::string>>> bindings;
  bindings.reserve(t.rules.size());
  for (const auto& r : t.rules) bindings.push_back(bindings_for(r, c.domain));

  for (int s = 0; s <= top; ++s) {
    bool changed = true;
    while (changed) {
      changed = false;
      if (++c.iteration_count > bound)
        throw IterationBoundExceeded("closure did not converge within " + std::to_string(bound) + " sweeps");
      for (std::size_t i = 0; i < t.rules.size(); ++i) {
        const Rule& r = t.rules[i];
        if (stratum.at(r.consequent.predicate) != s) continue;
        for (const auto& b : bindings[i]) {
          RuleInstance inst = instantiate(r, b);
          if (c.derived.count(inst.consequent)) continue;
          if (antecedents_hold(inst, c.derived)) {
            c.derived.insert(inst.consequent);
            changed = true;
          }
        }
      }
    }
  }

  for (std::size_t i = 0; i < t.rules.size(); ++i) {
    for (const auto& b : bindings[i]) {
      RuleInstance inst = instantiate(t.rules[i], b);
      if (antecedents_hold(inst, c.derived)) c.derivation_index[inst.consequent].push_back(std::move(inst));
    }
  }
  for (auto& [lit, insts] : c.derivation_index) std::sort(insts.begin(), insts.end());
  return c;
}

bool answer_question(const Theory&, const Closure& c, const Literal& q) {
  const bool present = c.derived.count(q.atom()) != 0;
  if (q.positive) return present;
  return !present || c.negative_facts.count(q) != 0;
}

bool answer_question(const Theory& t, const Question& q) {
  return answer_question(t, closure(t, literal_entities(q.literal)), q.literal);
}

int proof_depth(const ProofGraph& p) {
  if (p.nodes.empty()) throw DataError("proof_depth of an empty proof graph");
  std::map<ProofNode, std::vector<ProofNode>> out;
  std::map<ProofNode, int> indegree;
  for (const auto& n : p.nodes) indegree[n] = 0;
  for (const auto& [a, b] : p.edges) {
    if (!p.contains(a) || !p.contains(b)) throw DataError("proof edge " + a.id() + "->" + b.id() + " is dangling");
    out[a].push_back(b);
    ++indegree[b];
  }

  // Kahn order; if every node is ordered the graph is a DAG
  std::vector<ProofNode> order;
  std::vector<ProofNode> ready;
  for (const auto& [n, d] : indegree)
    if (d == 0) ready.push_back(n);
  auto remaining = indegree;
  while (!ready.empty()) {
    ProofNode n = ready.back();
    ready.pop_back();
    order.push_back(n);
    for (const auto& m : out[n])
      if (--remaining[m] == 0) ready.push_back(m);
  }

  auto weight = [](const ProofNode& n) { return n.is_rule() ? 1 : 0; };
  if (order.size() == p.nodes.size()) {
    std::map<ProofNode, int> best;
    int result = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      int tail = 0;
      for (const auto& m : out[*it]) tail = std::max(tail, best[m]);
      best[*it] = weight(*it) + tail;
      result = std::max(result, best[*it]);
    }
    return result;
  }

  // cyclic (e.g. R4->R5 and R5->R4): longest simple path by exhaustive search
  std::set<ProofNode> on_path;
  std::function<int(const ProofNode&)> longest = [&](const ProofNode& n) {
    on_path.insert(n);
    int tail = 0;
    for (const auto& m : out[n])
      if (!on_path.count(m)) tail = std::max(tail, longest(m));
    on_path.erase(n);
    return weight(n) + tail;
  };
  int result = 0;
  for (const auto& n : p.nodes) result = std::max(result, longest(n));
  return result;
}

std::set<std::string> critical_sentences(const Theory& t, const Question& q) {
  std::set<std::string> domain = theory_entities(t);
  add_entities(q.literal, domain);
  const bool base = answer_question(t, closure(t, domain), q.literal);
  std::set<std::string> out;
  for (std::size_t i = 0; i < t.facts.size(); ++i) {
    Theory reduced = t;
    reduced.facts.erase(reduced.facts.begin() + static_cast<std::ptrdiff_t>(i));
    if (answer_question(reduced, closure(reduced, domain), q.literal) != base) out.insert(t.facts[i].id());
  }
  for (std::size_t i = 0; i < t.rules.size(); ++i) {
    Theory reduced = t;
    reduced.rules.erase(reduced.rules.begin() + static_cast<std::ptrdiff_t>(i));
    if (answer_question(reduced, closure(reduced, domain), q.literal) != base) out.insert(t.rules[i].id());
  }
  return out;
}

}  // namespace ruleproof
