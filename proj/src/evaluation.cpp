#include "ruleproof/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <sstream>

#include "ruleproof/parallel.hpp"
#include "ruleproof/reasoner.hpp"

namespace ruleproof {

PredictionRecord prediction_from_json(const Json& j) {
  PredictionRecord r;
  r.theory_id = require_field<std::string>(j, "theory_id");
  r.question_id = require_field<std::string>(j, "question_id");
  r.answer = require_field<bool>(j, "answer");
  r.proof = proof_from_json(j);
  if (j.contains("connectivity_relaxed")) r.connectivity_relaxed = require_field<bool>(j, "connectivity_relaxed");
  return r;
}

std::vector<PredictionRecord> read_predictions(std::istream& in) {
  std::vector<PredictionRecord> out;
  for_each_jsonl(in, [&](const Json& j, int line) {
    try {
      out.push_back(prediction_from_json(j));
    } catch (const ParseError&) {
      throw;
    } catch (const DataError& e) {
      throw DataError("predictions line " + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

int gold_depth(const Question& q) {
  if (!q.proofs || q.proofs->empty()) throw DataError("question " + q.id() + " has no gold proof");
  int depth = 0;
  for (const auto& p : *q.proofs) depth = std::max(depth, proof_depth(p));
  return depth;
}

ExampleScore score_example(const Theory& t, const Question& gold, const PredictionRecord& pred) {
  if (!gold.answer) throw DataError("question " + gold.id() + " has no gold answer");
  if (!gold.proofs || gold.proofs->empty()) throw DataError("question " + gold.id() + " has no gold proof");
  for (const auto& n : pred.proof.nodes) {
    if ((n.is_fact() && !t.find_fact(n.index)) || (n.is_rule() && !t.find_rule(n.index)))
      throw DataError("prediction for " + t.id + "/" + gold.id() + " names unknown sentence " + n.id());
  }
  const ProofMatch m = match_proofs(pred.proof, *gold.proofs);
  ExampleScore s;
  s.qa = pred.answer == *gold.answer;
  s.na = m.node_match;
  s.ea = m.edge_match;
  s.pa = m.proof_match;
  s.fa = s.qa && s.pa;
  return s;
}

namespace {

struct Job {
  const Theory* theory;
  const Question* question;
  const PredictionRecord* prediction;
  int depth;
};

struct Tally {
  std::size_t count = 0, qa = 0, na = 0, ea = 0, pa = 0, fa = 0;

  void add(const ExampleScore& s) {
    ++count;
    qa += s.qa;
    na += s.na;
    ea += s.ea;
    pa += s.pa;
    fa += s.fa;
  }

  ReportRow row(std::string label) const {
    ReportRow r;
    r.label = std::move(label);
    r.count = count;
    if (count) {
      const double n = static_cast<double>(count);
      r.qa = qa / n;
      r.na = na / n;
      r.ea = ea / n;
      r.pa = pa / n;
      r.fa = fa / n;
    }
    return r;
  }
};

}  // namespace

Report aggregate_report(const std::vector<Theory>& dataset, const std::vector<PredictionRecord>& predictions,
                        const std::string& ablation, int threads) {
  std::map<std::pair<std::string, std::string>, const PredictionRecord*> by_key;
  for (const auto& p : predictions) {
    if (!by_key.emplace(std::make_pair(p.theory_id, p.question_id), &p).second)
      throw DataError("duplicate prediction for " + p.theory_id + "/" + p.question_id);
  }

  Report report;
  report.ablation = ablation;
  std::vector<Job> jobs;
  std::size_t matched = 0;
  for (const auto& t : dataset) {
    for (const auto& q : t.questions) {
      const auto it = by_key.find({t.id, q.id()});
      if (it == by_key.end()) throw DataError("missing prediction for " + t.id + "/" + q.id());
      ++matched;
      if (!q.proofs || q.proofs->empty()) {
        ++report.skipped;
        continue;
      }
      jobs.push_back({&t, &q, it->second, gold_depth(q)});
    }
  }
  if (matched != by_key.size()) {
    for (const auto& p : predictions) {
      const auto t = std::find_if(dataset.begin(), dataset.end(), [&](const Theory& x) { return x.id == p.theory_id; });
      if (t == dataset.end() || !t->find_question(p.question_id))
        throw DataError("prediction for unknown question " + p.theory_id + "/" + p.question_id);
    }
  }

  std::vector<ExampleScore> scores(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    scores[i] = score_example(*jobs[i].theory, *jobs[i].question, *jobs[i].prediction);
  });

  int max_depth = 5;
  for (const auto& j : jobs) max_depth = std::max(max_depth, j.depth);
  std::vector<Tally> by_depth(static_cast<std::size_t>(max_depth) + 1);
  Tally all;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    by_depth[static_cast<std::size_t>(jobs[i].depth)].add(scores[i]);
    all.add(scores[i]);
  }
  for (std::size_t d = 0; d < by_depth.size(); ++d) report.rows.push_back(by_depth[d].row(std::to_string(d)));
  report.rows.push_back(all.row("All"));
  return report;
}

bool metric_order_holds(const Report& r) {
  for (const auto& row : r.rows) {
    if (row.pa > std::min(row.na, row.ea) || row.fa > std::min(row.qa, row.pa)) return false;
  }
  return true;
}

std::string format_report(const Report& r) {
  std::ostringstream out;
  out << "# " << (r.ablation.empty() ? "report" : r.ablation) << "; " << r.bucket_note;
  if (r.skipped) out << "; skipped " << r.skipped << " question(s) without gold proofs";
  out << "\n";
  char line[128];
  std::snprintf(line, sizeof line, "%-6s %8s %7s %7s %7s %7s %7s\n", "Depth", "Cnt", "QA", "NA", "EA", "PA", "FA");
  out << line;
  for (const auto& row : r.rows) {
    if (row.count == 0) {
      std::snprintf(line, sizeof line, "%-6s %8zu %7s %7s %7s %7s %7s\n", row.label.c_str(), row.count, "-", "-", "-",
                    "-", "-");
    } else {
      std::snprintf(line, sizeof line, "%-6s %8zu %7.3f %7.3f %7.3f %7.3f %7.3f\n", row.label.c_str(), row.count,
                    row.qa, row.na, row.ea, row.pa, row.fa);
    }
    out << line;
  }
  return out.str();
}

Json report_to_json(const Report& r) {
  Json j;
  j["ablation"] = r.ablation;
  j["bucket"] = r.bucket_note;
  j["skipped"] = r.skipped;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json x;
    x["depth"] = row.label;
    x["count"] = row.count;
    for (const auto& [key, value] :
         {std::pair{"qa", row.qa}, {"na", row.na}, {"ea", row.ea}, {"pa", row.pa}, {"fa", row.fa}}) {
      if (row.count) x[key] = value;
      else x[key] = nullptr;
    }
    rows.push_back(std::move(x));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace ruleproof
