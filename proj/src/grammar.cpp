#include "ruleproof/grammar.hpp"

#include <array>
#include <cctype>
#include <optional>

#include "ruleproof/errors.hpp"

namespace ruleproof {

namespace {

constexpr std::array<std::string_view, 14> kReserved = {
    "if", "then", "and", "not", "is", "are", "does", "do", "the", "someone", "something", "they", "them", "it"};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool all_lower_alpha(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < 'a' || c > 'z') return false;
  return true;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::optional<std::string> base_form(std::string_view third) {
  for (std::string_view suffix : {"ches", "shes", "sses", "xes", "zzes"})
    if (ends_with(third, suffix)) return std::string(third.substr(0, third.size() - 2));
  if (third.size() > 1 && third.back() == 's') return std::string(third.substr(0, third.size() - 1));
  return std::nullopt;
}

// --- rendering -------------------------------------------------------------

struct RenderState {
  bool variable_introduced = false;
};

std::string entity_surface(std::string_view token) {
  if (token.substr(0, 4) == "the_") return "the " + std::string(token.substr(4));
  return capitalize(std::string(token));
}

std::string noun_phrase(const std::string& token, bool subject, RenderState& st) {
  if (!is_variable(token)) return entity_surface(token);
  if (!st.variable_introduced) {
    st.variable_introduced = true;
    return token;
  }
  if (token == kSomeone) return subject ? "they" : "them";
  return "it";
}

std::string clause(const Literal& l, RenderState& st) {
  std::string subj = noun_phrase(l.subject, true, st);
  const bool plural = subj == "they";
  std::string out = subj;
  if (!l.is_relation()) {
    out += plural ? " are " : " is ";
    if (!l.positive) out += "not ";
    out += l.predicate;
    return out;
  }
  if (l.positive) {
    out += " " + (plural ? l.predicate : third_person(l.predicate));
  } else {
    out += plural ? " do not " : " does not ";
    out += l.predicate;
  }
  out += " " + noun_phrase(*l.object, false, st);
  return out;
}

// --- parsing ---------------------------------------------------------------

struct Token {
  std::string text;
  int column;
};

class SentenceParser {
 public:
  SentenceParser(std::string_view text, int line) : line_(line) { tokenize(text); }

  ParsedSentence parse() {
    ParsedSentence out;
    if (tokens_.empty()) fail("empty sentence", end_column_);
    if (lowercase(peek().text) == "if") {
      out.is_rule = true;
      ++pos_;
      for (;;) {
        if (out.antecedents.empty() || starts_noun_phrase()) {
          out.antecedents.push_back(parse_clause());
        } else {
          out.antecedents.push_back(parse_continuation(out.antecedents.back()));
        }
        const Token& sep = expect_any("'and' or 'then'");
        if (sep.text == "and") continue;
        if (sep.text == "then") break;
        fail("expected 'and' or 'then', found '" + sep.text + "'", sep.column);
      }
      out.consequent = parse_clause();
    } else {
      out.consequent = parse_clause();
    }
    if (pos_ < tokens_.size()) fail("unexpected '" + peek().text + "'", peek().column);
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, int column) const { throw ParseError(msg, line_, column); }

  void tokenize(std::string_view text) {
    std::size_t end = text.size();
    while (end > 0 && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    if (end == 0) {
      end_column_ = 1;
      return;
    }
    if (text[end - 1] != '.') throw ParseError("sentence must end with '.'", line_, static_cast<int>(end));
    end_column_ = static_cast<int>(end);
    std::size_t i = 0;
    const std::size_t stop = end - 1;
    while (i < stop) {
      if (std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < stop && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      tokens_.push_back({std::string(text.substr(i, j - i)), static_cast<int>(i) + 1});
      i = j;
    }
  }

  const Token& peek() const { return tokens_[pos_]; }

  const Token& expect_any(const char* what) {
    if (pos_ >= tokens_.size()) fail(std::string("expected ") + what + " before end of sentence", end_column_);
    return tokens_[pos_++];
  }

  void expect(std::string_view word) {
    const Token& t = expect_any(std::string(word).c_str());
    if (t.text != word) fail("expected '" + std::string(word) + "', found '" + t.text + "'", t.column);
  }

  std::string expect_word(const char* what) {
    const Token& t = expect_any(what);
    if (!is_word_token(t.text)) fail(std::string("expected ") + what + ", found '" + t.text + "'", t.column);
    return t.text;
  }

  bool starts_noun_phrase() const {
    if (pos_ >= tokens_.size()) return false;
    const std::string& t = peek().text;
    const std::string low = lowercase(t);
    if (low == "someone" || low == "something" || low == "they" || low == "them" || low == "it" || low == "the")
      return true;
    return std::isupper(static_cast<unsigned char>(t[0])) != 0;
  }

  void bind_variable(std::string_view var, int column) {
    if (variable_ && *variable_ != var) fail("sentence mixes 'someone' and 'something'", column);
    variable_ = std::string(var);
  }

  // Returns the entity/variable token; `plural` is set for "they".
  std::string parse_noun_phrase(bool& plural) {
    plural = false;
    const Token& t = expect_any("a noun phrase");
    const std::string low = lowercase(t.text);
    if (low == "someone" || low == "something") {
      bind_variable(low, t.column);
      return low;
    }
    if (low == "they" || low == "them") {
      bind_variable(kSomeone, t.column);
      plural = low == "they";
      return std::string(kSomeone);
    }
    if (low == "it") {
      bind_variable(kSomething, t.column);
      return std::string(kSomething);
    }
    if (low == "the") {
      std::string noun = expect_word("a noun after 'the'");
      return "the_" + noun;
    }
    if (std::isupper(static_cast<unsigned char>(t.text[0]))) {
      std::string name = lowercase(t.text.substr(0, 1)) + t.text.substr(1);
      if (!all_lower_alpha(name) || is_reserved_word(name)) fail("invalid name '" + t.text + "'", t.column);
      return name;
    }
    fail("expected a noun phrase, found '" + t.text + "'", t.column);
  }

  Literal parse_clause() {
    Literal l;
    bool plural = false;
    l.subject = parse_noun_phrase(plural);
    const Token& verb = expect_any("a verb");
    if (verb.text == "is" || verb.text == "are") {
      if (pos_ < tokens_.size() && peek().text == "not") {
        ++pos_;
        l.positive = false;
      }
      l.predicate = expect_word("an attribute");
      return l;
    }
    if (verb.text == "does" || verb.text == "do") {
      expect("not");
      l.positive = false;
      l.predicate = expect_word("a verb");
    } else {
      if (!is_word_token(verb.text)) fail("expected a verb, found '" + verb.text + "'", verb.column);
      if (plural) {
        l.predicate = verb.text;
      } else {
        auto base = base_form(verb.text);
        if (!base || !is_word_token(*base)) fail("expected a third-person verb, found '" + verb.text + "'", verb.column);
        l.predicate = *base;
      }
    }
    bool object_plural = false;
    l.object = parse_noun_phrase(object_plural);
    return l;
  }

  Literal parse_continuation(const Literal& previous) {
    const int column = pos_ < tokens_.size() ? peek().column : end_column_;
    if (previous.is_relation()) fail("bare attribute must follow an attribute clause", column);
    Literal l;
    l.subject = previous.subject;
    if (pos_ < tokens_.size() && peek().text == "not") {
      ++pos_;
      l.positive = false;
    }
    l.predicate = expect_word("an attribute");
    return l;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int line_;
  int end_column_ = 1;
  std::optional<std::string> variable_;
};

}  // namespace

bool is_reserved_word(std::string_view token) {
  for (auto r : kReserved)
    if (r == token) return true;
  return false;
}

bool is_word_token(std::string_view token) { return all_lower_alpha(token) && !is_reserved_word(token); }

bool is_entity_token(std::string_view token) {
  if (token.substr(0, 4) == "the_") return is_word_token(token.substr(4));
  return is_word_token(token);
}

std::string third_person(std::string_view verb) {
  for (std::string_view suffix : {"ch", "sh", "ss", "x", "zz"})
    if (ends_with(verb, suffix)) return std::string(verb) + "es";
  return std::string(verb) + "s";
}

std::string render_literal(const Literal& l) {
  RenderState st;
  return capitalize(clause(l, st)) + ".";
}

std::string render_rule(const std::vector<Literal>& antecedents, const Literal& consequent) {
  RenderState st;
  std::string out = "If ";
  for (std::size_t i = 0; i < antecedents.size(); ++i) {
    const Literal& a = antecedents[i];
    if (i > 0) {
      out += " and ";
      const Literal& prev = antecedents[i - 1];
      if (!a.is_relation() && !prev.is_relation() && a.subject == prev.subject) {
        if (!a.positive) out += "not ";
        out += a.predicate;
        continue;
      }
    }
    out += clause(a, st);
  }
  out += " then " + clause(consequent, st) + ".";
  return out;
}

std::string render_sentence(const Fact& f) { return render_literal(f.literal); }
std::string render_sentence(const Rule& r) { return render_rule(r.antecedents, r.consequent); }
std::string render_sentence(const Question& q) { return render_literal(q.literal); }

ParsedSentence parse_sentence(std::string_view text, int line) { return SentenceParser(text, line).parse(); }

Literal parse_literal(std::string_view text, int line) {
  ParsedSentence s = parse_sentence(text, line);
  if (s.is_rule) throw ParseError("expected a fact sentence, found a rule", line, 1);
  return s.consequent;
}

}  // namespace ruleproof
