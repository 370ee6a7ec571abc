#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ruleproof/errors.hpp"
#include "ruleproof/proof_graph.hpp"

namespace ruleproof {

/// Largest number of facts plus rules allowed in one context.
inline constexpr std::size_t kMaxContextSize = 25;

/// Variable tokens. A rule uses at most one of them; "someone" renders with
/// they/them pronouns, "something" with it.
inline constexpr std::string_view kSomeone = "someone";
inline constexpr std::string_view kSomething = "something";

bool is_variable(std::string_view token);

/// Attribute literal (object absent) or binary relation literal.
struct Literal {
  std::string subject;
  std::string predicate;
  std::optional<std::string> object;
  bool positive = true;

  bool is_relation() const { return object.has_value(); }
  bool is_ground() const;
  /// The variable token used by this literal, if any.
  std::optional<std::string> variable() const;

  Literal atom() const;     // positive counterpart
  Literal negated() const;  // flips polarity

  auto operator<=>(const Literal&) const = default;
};

/// Debug form, e.g. "not like(bob, the_cat)".
std::string to_string(const Literal& l);

struct Fact {
  int index = 0;
  Literal literal;
  std::string text;

  std::string id() const { return "F" + std::to_string(index); }
  ProofNode node() const { return ProofNode::fact(index); }
};

struct Rule {
  int index = 0;
  std::vector<Literal> antecedents;
  Literal consequent;
  std::string text;

  std::string id() const { return "R" + std::to_string(index); }
  ProofNode node() const { return ProofNode::rule(index); }
  std::optional<std::string> variable() const;

  /// Structural identity, ignoring index and text.
  bool same_body(const Rule& other) const {
    return antecedents == other.antecedents && consequent == other.consequent;
  }
};

struct Question {
  int index = 0;
  Literal literal;
  std::string text;
  std::optional<bool> answer;
  std::optional<std::vector<ProofGraph>> proofs;
  std::optional<int> depth;

  std::string id() const { return "Q" + std::to_string(index); }
};

struct Theory {
  std::string id;
  std::vector<Fact> facts;
  std::vector<Rule> rules;
  std::vector<Question> questions;

  std::size_t context_size() const { return facts.size() + rules.size(); }

  const Fact* find_fact(int index) const;
  const Rule* find_rule(int index) const;
  const Question* find_question(std::string_view id) const;
  /// Rendered sentence for a fact or rule node; empty for NAF.
  std::string sentence_text(ProofNode n) const;
};

enum class ViolationKind {
  kContextSize,
  kDuplicateId,
  kIdGap,
  kDuplicateFact,
  kDuplicateRule,
  kVocabulary,
  kRuleShape,
  kTextMismatch,
  kGoldDepth,
};

std::string_view to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string id;  // offending sentence/question id, or the theory id
  std::string message;
};

/// Every invariant a theory must satisfy; empty when valid.
std::vector<Violation> validate_theory(const Theory& t);

/// Thrown by parse_theory when the parsed theory violates its invariants.
class TheoryError : public DataError {
 public:
  explicit TheoryError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

enum class TheoryFormat { kStructuredJson, kSentenceText };

/// Parses one theory. Structured JSON is a single `.theories.jsonl` record;
/// sentence text is one sentence per line (see grammar.hpp). Throws
/// ParseError on syntax errors and TheoryError on invariant violations.
Theory parse_theory(std::string_view input, TheoryFormat format);

/// Renumbers facts, rules and questions 1..n in list order and renders
/// their text. Used by builders that assemble theories structurally.
void render_all(Theory& t);

}  // namespace ruleproof
