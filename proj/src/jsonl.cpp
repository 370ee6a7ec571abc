#include "ruleproof/jsonl.hpp"

#include <istream>
#include <ostream>

#include "ruleproof/errors.hpp"
#include "ruleproof/grammar.hpp"

namespace ruleproof {

Json parse_json(std::string_view text, int line) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // byte is 1-based; map it to a column within a possibly multi-line text
    std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
    if (byte > text.size()) byte = text.size();
    int ln = line;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < byte; ++i) {
      if (text[i] == '\n') {
        ++ln;
        line_start = i + 1;
      }
    }
    std::string msg = e.what();
    if (auto pos = msg.rfind(": "); pos != std::string::npos) msg = msg.substr(pos + 2);
    throw ParseError("invalid JSON: " + msg, ln, static_cast<int>(byte - line_start) + 1);
  }
}

std::string dump_line(const Json& j) { return j.dump(); }

void for_each_jsonl(std::istream& in, const std::function<void(const Json&, int)>& fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json record = parse_json(line, line_no);
    try {
      fn(record, line_no);
    } catch (const ParseError&) {
      throw;
    } catch (const TheoryError&) {
      throw;
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

Json to_json(const Literal& l) {
  Json j;
  j["subject"] = l.subject;
  j["predicate"] = l.predicate;
  j["object"] = l.object ? Json(*l.object) : Json(nullptr);
  j["polarity"] = l.positive;
  return j;
}

Literal literal_from_json(const Json& j) {
  Literal l;
  l.subject = require_field<std::string>(j, "subject");
  l.predicate = require_field<std::string>(j, "predicate");
  if (j.contains("object") && !j.at("object").is_null()) l.object = require_field<std::string>(j, "object");
  l.positive = j.contains("polarity") ? require_field<bool>(j, "polarity") : true;
  return l;
}

Json to_json(const ProofGraph& p) {
  Json nodes = Json::array();
  for (const auto& n : p.nodes) nodes.push_back(n.id());
  Json edges = Json::array();
  for (const auto& [from, to] : p.edges) edges.push_back(Json::array({from.id(), to.id()}));
  Json j;
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  return j;
}

ProofGraph proof_from_json(const Json& j) {
  ProofGraph p;
  for (const auto& n : require_field<std::vector<std::string>>(j, "nodes")) p.nodes.insert(ProofNode::parse(n));
  if (j.contains("edges")) {
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
        throw DataError("proof edge must be a [source, target] pair of node ids");
      // edges do not add nodes here, so dangling edges stay visible to validate_structure
      p.edges.emplace(ProofNode::parse(e[0].get<std::string>()), ProofNode::parse(e[1].get<std::string>()));
    }
  }
  return p;
}

namespace {

int parse_index(const std::string& id, char prefix) {
  if (id.size() < 2 || id[0] != prefix) throw DataError("invalid id '" + id + "'");
  int value = 0;
  for (std::size_t i = 1; i < id.size(); ++i) {
    if (id[i] < '0' || id[i] > '9' || value > 100000) throw DataError("invalid id '" + id + "'");
    value = value * 10 + (id[i] - '0');
  }
  return value;
}

// Structured literal when present, otherwise parsed from the text.
Literal literal_or_text(const Json& j, const char* key, const std::string& text) {
  if (j.contains(key)) return literal_from_json(j.at(key));
  if (text.empty()) throw DataError(std::string("record needs '") + key + "' or 'text'");
  return parse_literal(text);
}

}  // namespace

Json to_json(const Theory& t) {
  Json facts = Json::array();
  for (const auto& f : t.facts) {
    Json j;
    j["id"] = f.id();
    j["text"] = f.text;
    j["literal"] = to_json(f.literal);
    facts.push_back(std::move(j));
  }
  Json rules = Json::array();
  for (const auto& r : t.rules) {
    Json j;
    j["id"] = r.id();
    j["text"] = r.text;
    Json ants = Json::array();
    for (const auto& a : r.antecedents) ants.push_back(to_json(a));
    j["antecedents"] = std::move(ants);
    j["consequent"] = to_json(r.consequent);
    rules.push_back(std::move(j));
  }
  Json questions = Json::array();
  for (const auto& q : t.questions) {
    Json j;
    j["id"] = q.id();
    j["text"] = q.text;
    j["literal"] = to_json(q.literal);
    if (q.answer) j["answer"] = *q.answer;
    if (q.depth) j["depth"] = *q.depth;
    if (q.proofs) {
      Json proofs = Json::array();
      for (const auto& p : *q.proofs) proofs.push_back(to_json(p));
      j["proofs"] = std::move(proofs);
    }
    questions.push_back(std::move(j));
  }
  Json j;
  j["id"] = t.id;
  j["facts"] = std::move(facts);
  j["rules"] = std::move(rules);
  j["questions"] = std::move(questions);
  return j;
}

Theory theory_from_json(const Json& j) {
  if (!j.is_object()) throw DataError("theory record must be a JSON object");
  Theory t;
  t.id = require_field<std::string>(j, "id");
  if (j.contains("facts")) {
    for (const auto& fj : j.at("facts")) {
      Fact f;
      f.index = parse_index(require_field<std::string>(fj, "id"), 'F');
      f.text = fj.contains("text") ? require_field<std::string>(fj, "text") : "";
      f.literal = literal_or_text(fj, "literal", f.text);
      if (f.text.empty()) f.text = render_sentence(f);
      t.facts.push_back(std::move(f));
    }
  }
  if (j.contains("rules")) {
    for (const auto& rj : j.at("rules")) {
      Rule r;
      r.index = parse_index(require_field<std::string>(rj, "id"), 'R');
      r.text = rj.contains("text") ? require_field<std::string>(rj, "text") : "";
      if (rj.contains("antecedents") || rj.contains("consequent")) {
        for (const auto& a : require_field<Json>(rj, "antecedents")) r.antecedents.push_back(literal_from_json(a));
        r.consequent = literal_from_json(require_field<Json>(rj, "consequent"));
      } else {
        if (r.text.empty()) throw DataError("rule record needs 'antecedents'/'consequent' or 'text'");
        ParsedSentence s = parse_sentence(r.text);
        if (!s.is_rule) throw DataError("rule " + r.id() + " text is not a rule");
        r.antecedents = std::move(s.antecedents);
        r.consequent = std::move(s.consequent);
      }
      if (r.text.empty()) r.text = render_sentence(r);
      t.rules.push_back(std::move(r));
    }
  }
  if (j.contains("questions")) {
    for (const auto& qj : j.at("questions")) {
      Question q;
      q.index = parse_index(require_field<std::string>(qj, "id"), 'Q');
      q.text = qj.contains("text") ? require_field<std::string>(qj, "text") : "";
      q.literal = literal_or_text(qj, "literal", q.text);
      if (q.text.empty()) q.text = render_sentence(q);
      if (qj.contains("answer") && !qj.at("answer").is_null()) q.answer = require_field<bool>(qj, "answer");
      if (qj.contains("depth") && !qj.at("depth").is_null()) q.depth = require_field<int>(qj, "depth");
      if (qj.contains("proofs") && !qj.at("proofs").is_null()) {
        std::vector<ProofGraph> proofs;
        for (const auto& pj : qj.at("proofs")) proofs.push_back(proof_from_json(pj));
        q.proofs = std::move(proofs);
      }
      t.questions.push_back(std::move(q));
    }
  }
  return t;
}

std::vector<Theory> read_theories(std::istream& in) {
  std::vector<Theory> out;
  for_each_jsonl(in, [&](const Json& record, int) {
    Theory t = theory_from_json(record);
    auto violations = validate_theory(t);
    if (!violations.empty()) throw TheoryError(std::move(violations));
    out.push_back(std::move(t));
  });
  return out;
}

void write_theories(std::ostream& out, const std::vector<Theory>& theories) {
  for (const auto& t : theories) out << dump_line(to_json(t)) << '\n';
}

}  // namespace ruleproof
