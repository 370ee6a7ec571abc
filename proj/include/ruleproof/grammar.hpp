#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ruleproof/theory.hpp"

// Fixed synthetic surface grammar.
//
//   fact      := clause "."
//   rule      := "If" cond ("and" (cond | ["not"] ATTR))* "then" clause "."
//   clause    := NP ("is" | "are") ["not"] ATTR
//              | NP VERB NP                 (third person "likes", plural "like")
//              | NP ("does" | "do") "not" VERB NP
//   NP        := Name | "the" NOUN | someone | something | they | them | it
//
// Entity tokens are lower-case words ("alan" renders as "Alan") or
// "the_<noun>" ("the bear"). A bare attribute after "and" continues the
// previous attribute clause's subject: "If someone is blue and rough ...".

namespace ruleproof {

std::string render_literal(const Literal& l);
std::string render_rule(const std::vector<Literal>& antecedents, const Literal& consequent);

std::string render_sentence(const Fact& f);
std::string render_sentence(const Rule& r);
std::string render_sentence(const Question& q);

struct ParsedSentence {
  bool is_rule = false;
  std::vector<Literal> antecedents;  // empty unless is_rule
  Literal consequent;                // the fact literal when !is_rule
};

/// Parses one sentence; `line` is used for error positions.
ParsedSentence parse_sentence(std::string_view text, int line = 1);

/// Parses a fact/question sentence. Rules are rejected.
Literal parse_literal(std::string_view text, int line = 1);

bool is_entity_token(std::string_view token);
bool is_word_token(std::string_view token);  // attributes and verbs
bool is_reserved_word(std::string_view token);

std::string third_person(std::string_view verb);

}  // namespace ruleproof
