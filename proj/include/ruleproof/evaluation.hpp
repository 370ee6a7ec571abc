#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ruleproof/jsonl.hpp"
#include "ruleproof/proof_graph.hpp"
#include "ruleproof/theory.hpp"

namespace ruleproof {

/// One line of a `.predictions.jsonl` file.
struct PredictionRecord {
  std::string theory_id;
  std::string question_id;
  bool answer = false;
  ProofGraph proof;
  bool connectivity_relaxed = false;
};

PredictionRecord prediction_from_json(const Json& j);
std::vector<PredictionRecord> read_predictions(std::istream& in);

struct ExampleScore {
  bool qa = false;
  bool na = false;
  bool ea = false;
  bool pa = false;
  bool fa = false;
};

/// Exact-match scoring of one prediction against its gold question. Throws
/// DataError if the gold lacks an answer or proofs, or if the predicted proof
/// names a sentence missing from `t`.
ExampleScore score_example(const Theory& t, const Question& gold, const PredictionRecord& pred);

/// Maximum depth over the gold proofs; the depth bucket of a question.
int gold_depth(const Question& q);

struct ReportRow {
  std::string label;  // "0".."5" or "All"
  std::size_t count = 0;
  double qa = 0, na = 0, ea = 0, pa = 0, fa = 0;
};

struct Report {
  std::string ablation;
  std::vector<ReportRow> rows;  // depth rows in order, then All
  std::size_t skipped = 0;      // questions without gold proofs
  std::string bucket_note = "depth bucket = maximum gold proof depth";

  const ReportRow& all() const { return rows.back(); }
};

/// Scores every gold question with exactly one prediction. Depth rows cover
/// 0..5 and any deeper bucket present. Throws DataError on a missing,
/// duplicate or unmatched prediction.
Report aggregate_report(const std::vector<Theory>& dataset, const std::vector<PredictionRecord>& predictions,
                        const std::string& ablation = "", int threads = 1);

/// PA <= min(NA, EA) and FA <= min(QA, PA) in every row.
bool metric_order_holds(const Report& r);

std::string format_report(const Report& r);
Json report_to_json(const Report& r);

}  // namespace ruleproof
