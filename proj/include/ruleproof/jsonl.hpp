#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ruleproof/proof_graph.hpp"
#include "ruleproof/theory.hpp"

namespace ruleproof {

/// Insertion-ordered JSON so that emitted records are byte-stable.
using Json = nlohmann::ordered_json;

/// Parses one JSON document; syntax errors become ParseError at `line`.
Json parse_json(std::string_view text, int line = 1);

/// Compact single-line serialization followed by no newline.
std::string dump_line(const Json& j);

/// Reads non-empty lines of a JSONL stream, invoking `fn(record, line_no)`.
void for_each_jsonl(std::istream& in, const std::function<void(const Json&, int)>& fn);

/// Reads a field, raising DataError with the field name on absence or type error.
template <typename T>
T require_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DataError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(std::string("field '") + key + "' has the wrong type");
  }
}

Json to_json(const Literal& l);
Literal literal_from_json(const Json& j);

Json to_json(const ProofGraph& p);
ProofGraph proof_from_json(const Json& j);

Json to_json(const Theory& t);
/// Structural conversion only; parse_theory/read_theories also validate.
Theory theory_from_json(const Json& j);

/// Reads and validates every theory in a `.theories.jsonl` stream.
std::vector<Theory> read_theories(std::istream& in);
void write_theories(std::ostream& out, const std::vector<Theory>& theories);

}  // namespace ruleproof
