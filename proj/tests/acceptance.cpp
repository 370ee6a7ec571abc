// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Tolerances and limits are pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "ruleproof/cli.hpp"
#include "ruleproof/datagen.hpp"
#include "ruleproof/decoder.hpp"
#include "ruleproof/evaluation.hpp"
#include "ruleproof/potentials.hpp"
#include "ruleproof/reasoner.hpp"

using namespace ruleproof;
namespace fs = std::filesystem;

namespace {

constexpr double kObjectiveTolerance = 1e-9;
constexpr double kGradientTolerance = 1e-5;
constexpr double kCriterion1Seconds = 60;
constexpr double kCriterion2Seconds = 120;
constexpr double kMinBaselineGain = 0.10;
constexpr double kMinDisconnectedShare = 0.10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Theory> flatten(const Dataset& d) {
  std::vector<Theory> all = d.train;
  all.insert(all.end(), d.dev.begin(), d.dev.end());
  all.insert(all.end(), d.test.begin(), d.test.end());
  return all;
}

// Every report produced below, for the metric-order check.
std::vector<Report>& evaluated_reports() {
  static std::vector<Report> reports;
  return reports;
}

Report evaluate(const std::vector<Theory>& ds, const std::function<DecodeResult(const Theory&, const Question&, std::size_t)>& decode,
                const std::string& label) {
  std::vector<PredictionRecord> preds;
  std::size_t i = 0;
  for (const auto& t : ds)
    for (const auto& q : t.questions) {
      const DecodeResult r = decode(t, q, i++);
      preds.push_back(prediction_from_json(prediction_record(t.id, q.id(), *q.answer, r)));
    }
  Report rep = aggregate_report(ds, preds, label, 4);
  evaluated_reports().push_back(rep);
  return rep;
}

// Dataset shared by criteria 3-5 and 7: 1000 questions, depth up to 5.
const std::vector<Theory>& du5() {
  static const std::vector<Theory> ds = [] {
    GenConfig cfg;
    cfg.name = "acc5";
    cfg.seed = 5;
    cfg.num_theories = 125;
    cfg.max_depth = 5;
    cfg.rules = {5, 12};
    cfg.questions_per_theory = 8;
    return flatten(generate_dataset(cfg, 4));
  }();
  return ds;
}

int max_true_depth(const Theory& t) {
  int depth = 0;
  const Closure c = closure(t);
  for (const auto& l : c.derived) {
    Question q;
    q.index = 1;
    q.literal = l;
    for (const auto& p : prove(t, q)) depth = std::max(depth, proof_depth(p));
  }
  return depth;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20241);
  oracle::RandomTheorySpec spec;
  spec.max_facts = 6;
  spec.max_rules = 6;
  std::size_t theories = 0, literals = 0, mismatches = 0;
  for (int trial = 0; theories < 1000 && trial < 100000; ++trial) {
    const Theory t = oracle::random_theory(rng, spec);
    try {
      closure(t);
    } catch (const NonStratifiedTheory&) {
      continue;
    }
    if (max_true_depth(t) > 3) continue;
    ++theories;
    for (const auto& atom : oracle::all_ground_literals(t)) {
      for (const Literal& l : {atom, atom.negated()}) {
        Question q;
        q.index = 1;
        q.literal = l;
        ++literals;
        mismatches += answer_question(t, q) != oracle::brute_force_answer(t, l);
      }
    }
  }
  const double secs = seconds_since(t0);
  return {theories >= 1000 && mismatches == 0 && secs < kCriterion1Seconds,
          std::to_string(theories) + " stratified theories, " + std::to_string(literals) + " literals, " +
              std::to_string(mismatches) + " mismatches, " + fmt("%.1f", secs) + " s (limit 60 s)"};
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(77);
  std::size_t instances = 0, agree = 0, infeasible = 0, repaired = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto inst = oracle::random_instance(rng, 6, trial % 3 != 0);
    const auto best = oracle::brute_force_decode(inst.p, inst.nodes, true);
    ++instances;
    if (!best.feasible) {
      ++infeasible;
      try {
        decode_proof(inst.p);
      } catch (const ConnectivityInfeasible&) {
        ++agree;
      }
      continue;
    }
    const DecodeResult r = decode_proof(inst.p);
    repaired += r.stats.repair_edges > 0;
    agree += std::abs(r.objective - best.objective) <= kObjectiveTolerance;
  }
  const double secs = seconds_since(t0);
  return {instances >= 500 && agree == instances && secs < kCriterion2Seconds,
          std::to_string(agree) + "/" + std::to_string(instances) + " objectives within 1e-9 of exhaustive (" +
              std::to_string(infeasible) + " infeasible, " + std::to_string(repaired) + " needed repair), " +
              fmt("%.1f", secs) + " s (limit 120 s)"};
}

Outcome criterion3() {
  const auto& ds = du5();
  std::size_t questions = 0;
  for (const auto& t : ds) questions += t.questions.size();
  const Report r = evaluate(
      ds, [](const Theory& t, const Question& q, std::size_t i) {
        return decode_proof(oracle_potentials(t, q.proofs->front(), 0.0, i));
      },
      "oracle eps=0");
  const auto& a = r.all();
  const bool exact = a.qa == 1.0 && a.na == 1.0 && a.ea == 1.0 && a.pa == 1.0 && a.fa == 1.0;
  return {questions >= 1000 && exact && a.count == questions,
          std::to_string(questions) + " questions; QA " + fmt("%.3f", a.qa) + " NA " + fmt("%.3f", a.na) + " EA " +
              fmt("%.3f", a.ea) + " PA " + fmt("%.3f", a.pa) + " FA " + fmt("%.3f", a.fa)};
}

Outcome criterion4() {
  const auto& ds = du5();
  std::vector<double> pa;
  std::string detail = "PA";
  for (double eps : {0.0, 0.1, 0.2, 0.4}) {
    const Report r = evaluate(
        ds, [eps](const Theory& t, const Question& q, std::size_t i) {
          return decode_with_fallback(oracle_potentials(t, q.proofs->front(), eps, 1000 + i));
        },
        "oracle eps=" + fmt("%.1f", eps));
    pa.push_back(r.all().pa);
    detail += fmt(" %.3f", r.all().pa);
  }
  bool monotone = true;
  for (std::size_t k = 1; k < pa.size(); ++k) monotone = monotone && pa[k] <= pa[k - 1];
  return {monotone && pa.back() < pa.front(), detail + " at eps 0, 0.1, 0.2, 0.4"};
}

Outcome criterion5() {
  const auto& ds = du5();
  std::size_t questions = 0, disconnected = 0, certified = 0, connected = 0;
  std::vector<PredictionRecord> on, off;
  std::size_t i = 0;
  for (const auto& t : ds)
    for (const auto& q : t.questions) {
      const Potentials p = adversarial_potentials(t, q.proofs->front(), 0.1, 0.05, 500 + i++);
      ++questions;
      const DecodeResult free = decode_proof(p, DecodeOptions{false});
      disconnected += free.proof.nodes.size() > 1 && !is_connected_undirected(free.proof);
      off.push_back(prediction_from_json(prediction_record(t.id, q.id(), *q.answer, free)));
      const DecodeResult full = decode_proof(p);
      on.push_back(prediction_from_json(prediction_record(t.id, q.id(), *q.answer, full)));
      connected += full.proof.nodes.size() == 1 || is_connected_undirected(full.proof);
      if (full.certificate) {
        const auto present = select_nodes(p.node_prob);
        const IlpInstance inst = IlpInstance::build(p, present);
        std::vector<IndexPair> edges;
        for (const auto& [a, b] : full.proof.edges) edges.emplace_back(p.layout.index_of(a), p.layout.index_of(b));
        std::sort(edges.begin(), edges.end());
        certified += verify_flow_certificate(inst, edges, *full.certificate) &&
                     full.certificate->value == static_cast<double>(full.proof.nodes.size());
      }
    }
  const Report r_on = aggregate_report(ds, on, "adversarial connectivity on", 4);
  const Report r_off = aggregate_report(ds, off, "adversarial connectivity off", 4);
  evaluated_reports().push_back(r_on);
  evaluated_reports().push_back(r_off);
  const double share = static_cast<double>(disconnected) / static_cast<double>(questions);
  return {share >= kMinDisconnectedShare && r_on.all().pa > r_off.all().pa && connected == questions &&
              certified == questions,
          fmt("%.1f%%", 100 * share) + " unconstrained optima disconnected; PA on " + fmt("%.3f", r_on.all().pa) +
              " vs off " + fmt("%.3f", r_off.all().pa) + "; " + std::to_string(connected) + "/" +
              std::to_string(questions) + " connected, " + std::to_string(certified) + "/" +
              std::to_string(questions) + " flow certificates of value |N| verified"};
}

Outcome criterion6() {
  const auto& ds = du5();
  std::mt19937_64 rng(606);
  std::bernoulli_distribution coin(0.3);
  std::size_t trials = 0, row_violations = 0;
  while (trials < 10000) {
    std::vector<PredictionRecord> preds;
    for (const auto& t : ds)
      for (const auto& q : t.questions) {
        PredictionRecord p{t.id, q.id(), *q.answer, q.proofs->at(rng() % q.proofs->size()), false};
        if (coin(rng)) p.answer = !p.answer;
        if (coin(rng) && !p.proof.edges.empty()) p.proof.edges.erase(std::next(p.proof.edges.begin(), static_cast<long>(rng() % p.proof.edges.size())));
        if (coin(rng)) p.proof.nodes.insert(ProofNode::fact(1 + static_cast<int>(rng() % t.facts.size())));
        if (coin(rng) && !t.rules.empty())
          p.proof.add_edge(*p.proof.nodes.begin(), ProofNode::rule(1 + static_cast<int>(rng() % t.rules.size())));
        const ExampleScore s = score_example(t, q, p);
        row_violations += (s.pa && !(s.na && s.ea)) || (s.fa && !(s.qa && s.pa));
        preds.push_back(std::move(p));
        ++trials;
      }
    const Report r = aggregate_report(ds, preds, "corrupted", 4);
    row_violations += !metric_order_holds(r);
  }
  std::size_t file_violations = 0;
  for (const auto& r : evaluated_reports()) file_violations += !metric_order_holds(r);
  return {row_violations == 0 && file_violations == 0,
          std::to_string(trials) + " corrupted predictions, " + std::to_string(row_violations) + " violations; " +
              std::to_string(evaluated_reports().size()) + " evaluated reports, " + std::to_string(file_violations) +
              " violations"};
}

Outcome criterion7() {
  std::size_t checked = 0, count_ok = 0, rebuild_ok = 0;
  for (const auto& t : du5()) {
    for (const auto& q : t.questions)
      for (const auto& gold : *q.proofs) {
        if (checked >= 1000) break;
        ++checked;
        const EdgeMask m = build_edge_mask(t, gold);
        std::size_t f = 0, r = 0;
        for (const auto& n : gold.nodes) {
          f += n.is_fact();
          r += n.is_rule();
        }
        const std::size_t closed = f * r + (gold.has_naf() ? r : 0) + r * (r > 0 ? r - 1 : 0);
        count_ok += m.unmasked_count() == closed;
        const auto edges = edges_from_mask(m);
        rebuild_ok += std::set<ProofEdge>(edges.begin(), edges.end()) == gold.edges;
      }
  }
  return {checked >= 1000 && count_ok == checked && rebuild_ok == checked,
          std::to_string(checked) + " gold proofs; closed-form count " + std::to_string(count_ok) + "/" +
              std::to_string(checked) + ", edges reconstructed " + std::to_string(rebuild_ok) + "/" +
              std::to_string(checked)};
}

Outcome criterion8() {
  GenConfig cfg;
  cfg.name = "acc3";
  cfg.seed = 3;
  cfg.num_theories = 300;
  cfg.max_depth = 3;
  const Dataset d = generate_dataset(cfg, 4);
  auto edges_of = [](const std::vector<Theory>& ts) {
    std::vector<LabeledEdge> out;
    for (const auto& t : ts)
      for (const auto& q : t.questions) {
        auto e = labeled_edges(t, q);
        out.insert(out.end(), e.begin(), e.end());
      }
    return out;
  };
  const auto train = edges_of(d.train), dev = edges_of(d.dev);
  const LinearScorer trained = fit_linear_scorer(train, TrainConfig{});
  const double acc = edge_accuracy(trained, dev), base = edge_accuracy(LinearScorer{}, dev);

  std::mt19937_64 rng(808);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<LabeledEdge> sample(train.begin(), train.begin() + std::min<std::size_t>(train.size(), 400));
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    LinearScorer s;
    s.config.l2 = trial % 2 ? 0.05 : 0.0;
    for (double& w : s.weights) w = normal(rng);
    s.bias = normal(rng);
    const auto g = loss_gradient(s, sample);
    for (std::size_t i = 0; i <= kNumFeatures; ++i) {
      const double h = 1e-6;
      LinearScorer plus = s, minus = s;
      (i < kNumFeatures ? plus.weights[i] : plus.bias) += h;
      (i < kNumFeatures ? minus.weights[i] : minus.bias) -= h;
      const double numeric = (logistic_loss(plus, sample) - logistic_loss(minus, sample)) / (2 * h);
      const double scale = std::max({std::abs(numeric), std::abs(g[i]), 1e-3});
      worst = std::max(worst, std::abs(numeric - g[i]) / scale);
    }
  }
  return {acc - base >= kMinBaselineGain && worst <= kGradientTolerance,
          "dev edge accuracy " + fmt("%.3f", acc) + " trained vs " + fmt("%.3f", base) + " untrained (gain " +
              fmt("%.1f", 100 * (acc - base)) + " points, need 10) on " + std::to_string(dev.size()) +
              " cells; max gradient relative error " + fmt("%.1e", worst)};
}

Theory without(const Theory& t, const ProofNode& n) {
  Theory out = t;
  if (n.is_fact())
    out.facts.erase(std::remove_if(out.facts.begin(), out.facts.end(), [&](const Fact& f) { return f.index == n.index; }),
                    out.facts.end());
  else
    out.rules.erase(std::remove_if(out.rules.begin(), out.rules.end(), [&](const Rule& r) { return r.index == n.index; }),
                    out.rules.end());
  return out;
}

Outcome criterion9() {
  GenConfig cfg;
  cfg.name = "acc9";
  cfg.seed = 9;
  cfg.negation_rate = 0.0;
  std::size_t questions = 0, facts_ok = 0, loo_ok = 0;
  for (std::uint64_t index = 0; questions < 500 && index < 2000; ++index) {
    const Theory t = generate_theory(cfg, index);
    for (const auto& q : t.questions) {
      if (questions >= 500) break;
      if (!*q.answer || q.proofs->size() != 1) continue;
      ++questions;
      const std::set<std::string> crit = critical_sentences(t, q);
      bool all_facts = true;
      for (const auto& n : q.proofs->front().nodes)
        if (n.is_fact()) all_facts = all_facts && crit.count(n.id());
      facts_ok += all_facts;

      std::set<std::string> expected;
      const bool base = oracle::brute_force_answer(t, q.literal);
      for (const auto& f : t.facts)
        if (oracle::brute_force_answer(without(t, f.node()), q.literal) != base) expected.insert(f.id());
      for (const auto& r : t.rules)
        if (oracle::brute_force_answer(without(t, r.node()), q.literal) != base) expected.insert(r.id());
      loo_ok += expected == crit;
    }
  }
  return {questions >= 500 && facts_ok == questions && loo_ok == questions,
          std::to_string(questions) + " true questions with a unique proof; proof facts critical in " +
              std::to_string(facts_ok) + ", leave-one-out matches brute force in " + std::to_string(loo_ok)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

bool cli(const std::vector<std::string>& args) {
  std::istringstream in;
  std::ostringstream out, err;
  const int code = run_command(args, in, out, err);
  if (code != 0) std::cerr << "command failed (" << code << "): " << err.str();
  return code == 0;
}

Outcome criterion10() {
  const fs::path root = fs::temp_directory_path() / "ruleproof_acceptance";
  fs::remove_all(root);
  const fs::path config = root / "cfg.json";
  fs::create_directories(root);
  std::ofstream(config) << R"({"name": "det", "num_theories": 60, "max_depth": 3})";
  const std::vector<std::string> files = {"data/train.theories.jsonl", "data/dev.theories.jsonl",
                                          "data/test.theories.jsonl",  "data/manifest.json",
                                          "potentials.jsonl",          "predictions.jsonl",
                                          "report.txt",                "report.json"};
  bool ran = true;
  for (const std::string run : {"a", "b"}) {
    const fs::path dir = root / run;
    const std::string threads = run == "a" ? "1" : "4";
    ran = ran && cli({"generate", "--config", config.string(), "--seed", "11", "-o", (dir / "data").string(), "--threads", threads});
    ran = ran && cli({"oracle-potentials", "--noise", "0.2", "--seed", "12", (dir / "data/test.theories.jsonl").string(),
                      "-o", (dir / "potentials.jsonl").string(), "--threads", threads});
    ran = ran && cli({"decode", (dir / "potentials.jsonl").string(), "-o", (dir / "predictions.jsonl").string(),
                      "--threads", threads});
    ran = ran && cli({"eval", "--theories", (dir / "data/test.theories.jsonl").string(),
                      (dir / "predictions.jsonl").string(), "-o", (dir / "report.txt").string(), "--json",
                      (dir / "report.json").string(), "--threads", threads});
  }
  std::size_t identical = 0;
  for (const auto& f : files) {
    const std::string a = slurp(root / "a" / f), b = slurp(root / "b" / f);
    identical += !a.empty() && a == b;
  }
  fs::remove_all(root);
  return {ran && identical == files.size(),
          std::to_string(identical) + "/" + std::to_string(files.size()) +
              " files byte-identical across two runs (1 and 4 threads)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"reasoner oracle equivalence", criterion1}, {"ILP exactness", criterion2},
      {"oracle closure", criterion3},              {"noise monotonicity", criterion4},
      {"connectivity ablation", criterion5},       {"metric-order invariants", criterion6},
      {"mask correctness", criterion7},            {"lexical baseline learning signal", criterion8},
      {"critical sentences", criterion9},          {"determinism", criterion10},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << k + 1 << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[k].first << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
