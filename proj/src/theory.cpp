#include "ruleproof/theory.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "ruleproof/grammar.hpp"
#include "ruleproof/jsonl.hpp"
#include "ruleproof/reasoner.hpp"

namespace ruleproof {

bool is_variable(std::string_view token) { return token == kSomeone || token == kSomething; }

bool Literal::is_ground() const { return !is_variable(subject) && !(object && is_variable(*object)); }

std::optional<std::string> Literal::variable() const {
  if (is_variable(subject)) return subject;
  if (object && is_variable(*object)) return *object;
  return std::nullopt;
}

Literal Literal::atom() const {
  Literal l = *this;
  l.positive = true;
  return l;
}

Literal Literal::negated() const {
  Literal l = *this;
  l.positive = !positive;
  return l;
}

std::string to_string(const Literal& l) {
  std::string out = l.positive ? "" : "not ";
  out += l.predicate + "(" + l.subject;
  if (l.object) out += ", " + *l.object;
  return out + ")";
}

std::optional<std::string> Rule::variable() const {
  if (auto v = consequent.variable()) return v;
  for (const auto& a : antecedents)
    if (auto v = a.variable()) return v;
  return std::nullopt;
}

const Fact* Theory::find_fact(int index) const {
  for (const auto& f : facts)
    if (f.index == index) return &f;
  return nullptr;
}

const Rule* Theory::find_rule(int index) const {
  for (const auto& r : rules)
    if (r.index == index) return &r;
  return nullptr;
}

const Question* Theory::find_question(std::string_view id) const {
  for (const auto& q : questions)
    if (q.id() == id) return &q;
  return nullptr;
}

std::string Theory::sentence_text(ProofNode n) const {
  if (n.is_fact()) {
    if (const Fact* f = find_fact(n.index)) return f->text;
  } else if (n.is_rule()) {
    if (const Rule* r = find_rule(n.index)) return r->text;
  }
  return "";
}

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::kContextSize: return "context-size";
    case ViolationKind::kDuplicateId: return "duplicate-id";
    case ViolationKind::kIdGap: return "id-gap";
    case ViolationKind::kDuplicateFact: return "duplicate-fact";
    case ViolationKind::kDuplicateRule: return "duplicate-rule";
    case ViolationKind::kVocabulary: return "vocabulary";
    case ViolationKind::kRuleShape: return "rule-shape";
    case ViolationKind::kTextMismatch: return "text-mismatch";
    case ViolationKind::kGoldDepth: return "gold-depth";
  }
  return "unknown";
}

namespace {

std::string describe(const std::vector<Violation>& vs) {
  std::ostringstream os;
  os << "invalid theory:";
  for (const auto& v : vs) os << " [" << to_string(v.kind) << " " << v.id << ": " << v.message << "]";
  return os.str();
}

class Validator {
 public:
  explicit Validator(const Theory& t) : t_(t) {}

  std::vector<Violation> run() {
    if (t_.context_size() > kMaxContextSize)
      add(ViolationKind::kContextSize, t_.id,
          std::to_string(t_.context_size()) + " facts and rules exceed the limit of " +
              std::to_string(kMaxContextSize));
    check_ids(t_.facts, "F");
    check_ids(t_.rules, "R");
    check_ids(t_.questions, "Q");

    std::set<Literal> fact_literals;
    for (const auto& f : t_.facts) {
      check_literal(f.literal, f.id());
      if (!f.literal.is_ground()) add(ViolationKind::kVocabulary, f.id(), "facts must be ground");
      if (!fact_literals.insert(f.literal).second)
        add(ViolationKind::kDuplicateFact, f.id(), "repeats the literal " + to_string(f.literal));
      check_text(f.text, f.id(), [&](const ParsedSentence& s) { return !s.is_rule && s.consequent == f.literal; });
    }

    for (std::size_t i = 0; i < t_.rules.size(); ++i) {
      const Rule& r = t_.rules[i];
      check_rule(r);
      for (std::size_t j = 0; j < i; ++j)
        if (t_.rules[j].same_body(r))
          add(ViolationKind::kDuplicateRule, r.id(), "identical to " + t_.rules[j].id());
      check_text(r.text, r.id(), [&](const ParsedSentence& s) {
        return s.is_rule && s.antecedents == r.antecedents && s.consequent == r.consequent;
      });
    }

    for (const auto& q : t_.questions) {
      check_literal(q.literal, q.id());
      if (!q.literal.is_ground()) add(ViolationKind::kVocabulary, q.id(), "questions must be ground");
      check_text(q.text, q.id(), [&](const ParsedSentence& s) { return !s.is_rule && s.consequent == q.literal; });
      check_gold_depth(q);
    }

    for (const auto& [pred, usage] : predicate_kind_)
      if (usage.attribute && usage.relation)
        add(ViolationKind::kVocabulary, usage.first_id,
            "predicate '" + pred + "' is used both as an attribute and as a relation");
    return std::move(out_);
  }

 private:
  struct PredicateUsage {
    bool attribute = false;
    bool relation = false;
    std::string first_id;
  };

  void add(ViolationKind k, std::string id, std::string msg) { out_.push_back({k, std::move(id), std::move(msg)}); }

  template <typename Item>
  void check_ids(const std::vector<Item>& items, const char* prefix) {
    std::set<int> seen;
    for (const auto& item : items) {
      if (item.index < 1) {
        add(ViolationKind::kIdGap, item.id(), std::string("ids must be ") + prefix + "1, " + prefix + "2, ...");
        continue;
      }
      if (!seen.insert(item.index).second) add(ViolationKind::kDuplicateId, item.id(), "id used more than once");
    }
    int expected = 1;
    for (int idx : seen) {
      if (idx != expected) {
        add(ViolationKind::kIdGap, std::string(prefix) + std::to_string(expected),
            "ids are not contiguous from " + std::string(prefix) + "1");
        break;
      }
      ++expected;
    }
  }

  void check_literal(const Literal& l, const std::string& id) {
    auto token_ok = [](const std::string& tok) { return is_variable(tok) || is_entity_token(tok); };
    if (!token_ok(l.subject)) add(ViolationKind::kVocabulary, id, "invalid subject token '" + l.subject + "'");
    if (l.object && !token_ok(*l.object)) add(ViolationKind::kVocabulary, id, "invalid object token '" + *l.object + "'");
    if (!is_word_token(l.predicate)) {
      add(ViolationKind::kVocabulary, id, "invalid predicate token '" + l.predicate + "'");
    } else if (l.is_relation()) {
      // the renderer's third-person form must parse back to the same verb
      try {
        Literal probe{"alan", l.predicate, std::string("bob"), true};
        if (parse_literal(render_literal(probe)) != probe)
          add(ViolationKind::kVocabulary, id, "verb '" + l.predicate + "' does not round-trip");
      } catch (const ParseError&) {
        add(ViolationKind::kVocabulary, id, "verb '" + l.predicate + "' does not round-trip");
      }
    }
    auto& usage = predicate_kind_[l.predicate];
    if (usage.first_id.empty()) usage.first_id = id;
    (l.is_relation() ? usage.relation : usage.attribute) = true;
  }

  void check_rule(const Rule& r) {
    if (r.antecedents.empty()) add(ViolationKind::kRuleShape, r.id(), "rule needs at least one antecedent");
    if (!r.consequent.positive) add(ViolationKind::kRuleShape, r.id(), "rule consequent must be positive");
    std::set<std::string> vars;
    bool antecedent_binds = false;
    auto collect = [&vars](const Literal& l) {
      if (is_variable(l.subject)) vars.insert(l.subject);
      if (l.object && is_variable(*l.object)) vars.insert(*l.object);
    };
    for (const auto& a : r.antecedents) {
      check_literal(a, r.id());
      collect(a);
      if (a.variable()) antecedent_binds = true;
    }
    check_literal(r.consequent, r.id());
    collect(r.consequent);
    if (r.consequent.variable()) {
      if (!antecedent_binds)
        add(ViolationKind::kRuleShape, r.id(), "consequent variable does not occur in any antecedent");
    }
    if (vars.size() > 1) add(ViolationKind::kVocabulary, r.id(), "rule mixes 'someone' and 'something'");
  }

  template <typename Pred>
  void check_text(const std::string& text, const std::string& id, Pred matches) {
    if (text.empty()) return;
    try {
      if (!matches(parse_sentence(text))) add(ViolationKind::kTextMismatch, id, "text does not match the structure");
    } catch (const ParseError& e) {
      add(ViolationKind::kTextMismatch, id, std::string("text does not parse: ") + e.what());
    }
  }

  void check_gold_depth(const Question& q) {
    if (!q.proofs || !q.depth || q.proofs->empty()) return;
    int max_depth = 0;
    try {
      for (const auto& p : *q.proofs) max_depth = std::max(max_depth, proof_depth(p));
    } catch (const DataError& e) {
      add(ViolationKind::kGoldDepth, q.id(), e.what());
      return;
    }
    if (max_depth != *q.depth)
      add(ViolationKind::kGoldDepth, q.id(),
          "depth " + std::to_string(*q.depth) + " differs from deepest proof " + std::to_string(max_depth));
  }

  const Theory& t_;
  std::vector<Violation> out_;
  std::map<std::string, PredicateUsage> predicate_kind_;
};

Theory parse_sentence_text(std::string_view input) {
  Theory t;
  t.id = "theory";
  int line_no = 0;
  std::size_t start = 0;
  while (start <= input.size()) {
    std::size_t end = input.find('\n', start);
    if (end == std::string_view::npos) end = input.size();
    std::string_view raw = input.substr(start, end - start);
    start = end + 1;
    ++line_no;

    std::size_t b = raw.find_first_not_of(" \t\r");
    if (b == std::string_view::npos || raw[b] == '#') {
      if (end == input.size()) break;
      continue;
    }
    std::size_t e = raw.find_last_not_of(" \t\r");
    std::string_view line = raw.substr(b, e - b + 1);
    const int col0 = static_cast<int>(b);

    auto reposition = [&](const ParseError& err) {
      return ParseError(err.detail(), line_no, err.column() + col0);
    };

    if (line.substr(0, 7) == "theory:") {
      std::string_view id = line.substr(7);
      id.remove_prefix(std::min(id.find_first_not_of(' '), id.size()));
      if (id.empty()) throw ParseError("empty theory id", line_no, col0 + 8);
      t.id = std::string(id);
    } else if (line[0] == '?') {
      std::string_view body = line.substr(1);
      std::size_t skip = std::min(body.find_first_not_of(' '), body.size());
      body.remove_prefix(skip);
      Question q;
      q.index = static_cast<int>(t.questions.size()) + 1;
      q.text = std::string(body);
      try {
        q.literal = parse_literal(body, line_no);
      } catch (const ParseError& err) {
        throw ParseError(err.detail(), line_no, err.column() + col0 + 1 + static_cast<int>(skip));
      }
      t.questions.push_back(std::move(q));
    } else {
      ParsedSentence s;
      try {
        s = parse_sentence(line, line_no);
      } catch (const ParseError& err) {
        throw reposition(err);
      }
      if (s.is_rule) {
        Rule r;
        r.index = static_cast<int>(t.rules.size()) + 1;
        r.antecedents = std::move(s.antecedents);
        r.consequent = std::move(s.consequent);
        r.text = std::string(line);
        t.rules.push_back(std::move(r));
      } else {
        Fact f;
        f.index = static_cast<int>(t.facts.size()) + 1;
        f.literal = std::move(s.consequent);
        f.text = std::string(line);
        t.facts.push_back(std::move(f));
      }
    }
    if (end == input.size()) break;
  }
  return t;
}

}  // namespace

std::vector<Violation> validate_theory(const Theory& t) { return Validator(t).run(); }

TheoryError::TheoryError(std::vector<Violation> violations)
    : DataError(describe(violations)), violations_(std::move(violations)) {}

Theory parse_theory(std::string_view input, TheoryFormat format) {
  Theory t;
  if (format == TheoryFormat::kStructuredJson) {
    t = theory_from_json(parse_json(input));
  } else {
    t = parse_sentence_text(input);
  }
  auto violations = validate_theory(t);
  if (!violations.empty()) throw TheoryError(std::move(violations));
  return t;
}

void render_all(Theory& t) {
  int i = 0;
  for (auto& f : t.facts) {
    f.index = ++i;
    f.text = render_sentence(f);
  }
  i = 0;
  for (auto& r : t.rules) {
    r.index = ++i;
    r.text = render_sentence(r);
  }
  i = 0;
  for (auto& q : t.questions) {
    q.index = ++i;
    q.text = render_sentence(q);
  }
}

}  // namespace ruleproof
