#include "ruleproof/potentials.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "ruleproof/random.hpp"

namespace ruleproof {

int NodeLayout::index_of(const ProofNode& n) const {
  switch (n.kind) {
    case NodeKind::kFact:
      if (n.index >= 1 && n.index <= num_facts) return n.index - 1;
      break;
    case NodeKind::kRule:
      if (n.index >= 1 && n.index <= num_rules) return num_facts + n.index - 1;
      break;
    case NodeKind::kNaf:
      return naf_index();
  }
  throw DataError("node " + n.id() + " is outside a theory with " + std::to_string(num_facts) + " facts and " +
                  std::to_string(num_rules) + " rules");
}

ProofNode NodeLayout::node_at(int i) const {
  if (i < 0 || i >= size()) throw DataError("node index " + std::to_string(i) + " out of range");
  if (i < num_facts) return ProofNode::fact(i + 1);
  if (i < num_facts + num_rules) return ProofNode::rule(i - num_facts + 1);
  return ProofNode::naf();
}

std::size_t EdgeMask::unmasked_count() const {
  std::size_t n = 0;
  for (const auto& row : label)
    for (int v : row) n += v != kMasked;
  return n;
}

EdgeMask build_edge_mask(const Theory& t, const ProofGraph& gold) {
  EdgeMask m;
  m.layout = NodeLayout::of(t);
  const int k = m.layout.size();
  std::vector<bool> present(static_cast<std::size_t>(k), false);
  for (const auto& n : gold.nodes) present[static_cast<std::size_t>(m.layout.index_of(n))] = true;
  m.label.assign(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k), kMasked));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (present[static_cast<std::size_t>(i)] && present[static_cast<std::size_t>(j)] &&
          edge_type_allowed(m.layout, i, j))
        m.label[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 0;
  for (const auto& [a, b] : gold.edges) {
    int& cell = m.label[static_cast<std::size_t>(m.layout.index_of(a))][static_cast<std::size_t>(m.layout.index_of(b))];
    if (cell == kMasked) throw DataError("gold edge " + a.id() + "->" + b.id() + " is not admissible");
    cell = 1;
  }
  return m;
}

std::vector<ProofEdge> edges_from_mask(const EdgeMask& mask) {
  std::vector<ProofEdge> out;
  for (int i = 0; i < mask.layout.size(); ++i)
    for (int j = 0; j < mask.layout.size(); ++j)
      if (mask.label[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == 1)
        out.emplace_back(mask.layout.node_at(i), mask.layout.node_at(j));
  std::sort(out.begin(), out.end());
  return out;
}

void Potentials::validate() const {
  const auto k = static_cast<std::size_t>(layout.size());
  if (node_prob.size() != k) throw DataError("node_prob has " + std::to_string(node_prob.size()) +
                                             " entries, expected " + std::to_string(k));
  if (edge_prob.size() != k) throw DataError("edge_prob has " + std::to_string(edge_prob.size()) + " rows");
  auto check = [](double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw DataError(std::string(what) + " value outside [0,1]");
  };
  for (double v : node_prob) check(v, "node_prob");
  for (const auto& row : edge_prob) {
    if (row.size() != k) throw DataError("edge_prob row has " + std::to_string(row.size()) + " entries");
    for (double v : row) check(v, "edge_prob");
  }
}

Potentials oracle_potentials(const Theory& t, const ProofGraph& gold, double noise, std::uint64_t seed) {
  if (!(noise >= 0.0 && noise < 0.5)) throw std::invalid_argument("noise must lie in [0, 0.5)");
  Potentials p;
  p.layout = NodeLayout::of(t);
  const int k = p.layout.size();
  std::set<int> nodes;
  for (const auto& n : gold.nodes) nodes.insert(p.layout.index_of(n));
  std::set<std::pair<int, int>> edges;
  for (const auto& [a, b] : gold.edges) edges.emplace(p.layout.index_of(a), p.layout.index_of(b));

  std::mt19937_64 rng(seed);
  const double width = 2.0 * noise;
  p.node_prob.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double u = unit_uniform(rng) * width;
    p.node_prob[static_cast<std::size_t>(i)] = nodes.count(i) ? 1.0 - u : u;
  }
  p.edge_prob.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double v = unit_uniform(rng) * width;
      if (i != j) p.edge_prob[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = edges.count({i, j}) ? 1.0 - v : v;
    }
  }
  return p;
}

Potentials adversarial_potentials(const Theory& t, const ProofGraph& gold, double noise, double delta,
                                  std::uint64_t seed) {
  if (!(delta > 0.0 && delta <= 0.5)) throw std::invalid_argument("delta must lie in (0, 0.5]");
  Potentials p = oracle_potentials(t, gold, noise, seed);
  std::vector<ProofEdge> bridges;
  for (const auto& e : gold.edges) {
    ProofGraph without = gold;
    without.edges.erase(e);
    if (!is_connected_undirected(without)) bridges.push_back(e);
  }
  if (bridges.empty()) return p;
  std::mt19937_64 rng(derive_seed(seed, 0xb41d6e));
  const ProofEdge& e = bridges[uniform_below(rng, bridges.size())];
  p.edge_prob[static_cast<std::size_t>(p.layout.index_of(e.first))][static_cast<std::size_t>(p.layout.index_of(e.second))] =
      0.5 - delta;
  return p;
}

std::array<double, kNumFeatures> FeatureVector::values() const {
  return {unigram_jaccard,
          bigram_jaccard,
          normalized_length_difference,
          source_has_negation ? 1.0 : 0.0,
          target_has_negation ? 1.0 : 0.0,
          fact_to_rule ? 1.0 : 0.0,
          rule_to_rule ? 1.0 : 0.0,
          naf_to_rule ? 1.0 : 0.0,
          conclusion_condition_jaccard};
}

std::vector<std::string> lexical_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || c == '_') {
      cur += static_cast<char>(std::tolower(uc));
    } else if (std::isspace(uc)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

namespace {

template <typename T>
double jaccard(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& x : a) common += b.count(x);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

std::set<std::pair<std::string, std::string>> bigrams(const std::vector<std::string>& toks) {
  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) out.emplace(toks[i], toks[i + 1]);
  return out;
}

// Tokens strictly between the leading "if" and "then" of a rule sentence.
std::vector<std::string> condition_part(const std::vector<std::string>& toks) {
  const auto then = std::find(toks.begin(), toks.end(), "then");
  if (toks.empty() || toks.front() != "if" || then == toks.end()) return {};
  return {toks.begin() + 1, then};
}

// Tokens after "then" for a rule sentence; the whole sentence otherwise.
std::vector<std::string> conclusion_part(const std::vector<std::string>& toks) {
  const auto then = std::find(toks.begin(), toks.end(), "then");
  if (toks.empty() || toks.front() != "if" || then == toks.end()) return toks;
  return {then + 1, toks.end()};
}

bool has_not(const std::vector<std::string>& toks) { return std::find(toks.begin(), toks.end(), "not") != toks.end(); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double margin(const LinearScorer& s, const FeatureVector& f) {
  const auto x = f.values();
  double z = s.bias;
  for (std::size_t i = 0; i < kNumFeatures; ++i) z += s.weights[i] * x[i];
  return z;
}

void accumulate_gradient(const LinearScorer& s, const std::vector<LabeledEdge>& data, const std::size_t* idx,
                         std::size_t n, std::vector<double>& g) {
  g.assign(kNumFeatures + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const LabeledEdge& e = data[idx ? idx[k] : k];
    const double r = sigmoid(margin(s, e.features)) - e.label;
    const auto x = e.features.values();
    for (std::size_t i = 0; i < kNumFeatures; ++i) g[i] += r * x[i];
    g[kNumFeatures] += r;
  }
  for (auto& v : g) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < kNumFeatures; ++i) g[i] += s.config.l2 * s.weights[i];
}

}  // namespace

double unigram_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return jaccard(std::set<std::string>(a.begin(), a.end()), std::set<std::string>(b.begin(), b.end()));
}

double bigram_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return jaccard(bigrams(a), bigrams(b));
}

FeatureVector lexical_edge_features(const Theory& t, const ProofNode& src, const ProofNode& dst) {
  if (!dst.is_rule() || !t.find_rule(dst.index)) throw DataError("edge target " + dst.id() + " is not a rule");
  if (src == dst) throw DataError("self edge " + src.id());
  if ((src.is_fact() && !t.find_fact(src.index)) || (src.is_rule() && !t.find_rule(src.index)))
    throw DataError("edge source " + src.id() + " is not in theory " + t.id);
  const auto a = src.is_naf() ? std::vector<std::string>{} : lexical_tokens(t.sentence_text(src));
  const auto b = lexical_tokens(t.sentence_text(dst));
  FeatureVector f;
  f.unigram_jaccard = unigram_jaccard(a, b);
  f.bigram_jaccard = bigram_jaccard(a, b);
  const double la = static_cast<double>(a.size()), lb = static_cast<double>(b.size());
  f.normalized_length_difference = std::max(la, lb) > 0 ? std::abs(la - lb) / std::max(la, lb) : 0.0;
  f.source_has_negation = has_not(a);
  f.target_has_negation = has_not(b);
  f.fact_to_rule = src.is_fact();
  f.rule_to_rule = src.is_rule();
  f.naf_to_rule = src.is_naf();
  f.conclusion_condition_jaccard = unigram_jaccard(conclusion_part(a), condition_part(b));
  return f;
}

double LinearScorer::probability(const FeatureVector& f) const { return sigmoid(margin(*this, f)); }

double logistic_loss(const LinearScorer& s, const std::vector<LabeledEdge>& data) {
  if (data.empty()) return 0.0;
  double total = 0;
  for (const auto& e : data) {
    const double z = margin(s, e.features);
    total += e.label ? softplus(-z) : softplus(z);
  }
  double reg = 0;
  for (double w : s.weights) reg += w * w;
  return total / static_cast<double>(data.size()) + 0.5 * s.config.l2 * reg;
}

std::vector<double> loss_gradient(const LinearScorer& s, const std::vector<LabeledEdge>& data) {
  if (data.empty()) return std::vector<double>(kNumFeatures + 1, 0.0);
  std::vector<double> g;
  accumulate_gradient(s, data, nullptr, data.size(), g);
  return g;
}

LinearScorer fit_linear_scorer(const std::vector<LabeledEdge>& train, const TrainConfig& config,
                               std::vector<double>* loss_history) {
  if (train.empty()) throw DataError("empty training set");
  for (const auto& e : train) {
    for (double v : e.features.values())
      if (!std::isfinite(v)) throw DataError("non-finite feature value");
    if (e.label != 0 && e.label != 1) throw DataError("edge label must be 0 or 1");
  }
  if (config.epochs < 0 || !(config.learning_rate > 0)) throw std::invalid_argument("invalid hyperparameters");
  LinearScorer s;
  s.config = config;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = config.batch_size == 0 ? train.size() : std::min(config.batch_size, train.size());
  std::mt19937_64 rng(config.seed);
  std::vector<double> g;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (batch < train.size()) portable_shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < train.size(); start += batch) {
      const std::size_t n = std::min(batch, train.size() - start);
      accumulate_gradient(s, train, order.data() + start, n, g);
      for (std::size_t i = 0; i < kNumFeatures; ++i) s.weights[i] -= config.learning_rate * g[i];
      s.bias -= config.learning_rate * g[kNumFeatures];
    }
    if (loss_history) loss_history->push_back(logistic_loss(s, train));
  }
  return s;
}

std::vector<LabeledEdge> labeled_edges(const Theory& t, const Question& q) {
  std::vector<LabeledEdge> out;
  if (!q.proofs || q.proofs->empty()) return out;
  const EdgeMask m = build_edge_mask(t, q.proofs->front());
  for (int i = 0; i < m.layout.size(); ++i) {
    for (int j = 0; j < m.layout.size(); ++j) {
      const int label = m.label[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (label == kMasked) continue;
      out.push_back({lexical_edge_features(t, m.layout.node_at(i), m.layout.node_at(j)), label});
    }
  }
  return out;
}

double edge_accuracy(const LinearScorer& s, const std::vector<LabeledEdge>& data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& e : data) correct += static_cast<int>(s.predict(e.features)) == e.label;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

Potentials lexical_potentials(const Theory& t, const Question& q, const LinearScorer& s) {
  Potentials p;
  p.layout = NodeLayout::of(t);
  const int k = p.layout.size();
  p.node_prob.assign(static_cast<std::size_t>(k), 0.0);
  if (q.proofs && !q.proofs->empty())
    for (const auto& n : q.proofs->front().nodes)
      if (!n.is_naf()) p.node_prob[static_cast<std::size_t>(p.layout.index_of(n))] = 1.0;
  std::size_t negative = 0, total = 0;
  for (const auto& r : t.rules) {
    for (const auto& a : r.antecedents) negative += !a.positive;
    total += r.antecedents.size();
  }
  p.node_prob.back() = total ? static_cast<double>(negative) / static_cast<double>(total) : 0.0;
  p.edge_prob.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (edge_type_allowed(p.layout, i, j))
        p.edge_prob[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            s.probability(lexical_edge_features(t, p.layout.node_at(i), p.layout.node_at(j)));
  return p;
}

Json scorer_to_json(const LinearScorer& s) {
  Json j;
  j["weights"] = s.weights;
  j["bias"] = s.bias;
  j["learning_rate"] = s.config.learning_rate;
  j["epochs"] = s.config.epochs;
  j["seed"] = s.config.seed;
  j["batch_size"] = s.config.batch_size;
  j["l2"] = s.config.l2;
  return j;
}

LinearScorer scorer_from_json(const Json& j) {
  LinearScorer s;
  const auto w = require_field<std::vector<double>>(j, "weights");
  if (w.size() != kNumFeatures) throw DataError("scorer needs " + std::to_string(kNumFeatures) + " weights");
  std::copy(w.begin(), w.end(), s.weights.begin());
  s.bias = require_field<double>(j, "bias");
  s.config.learning_rate = require_field<double>(j, "learning_rate");
  s.config.epochs = require_field<int>(j, "epochs");
  s.config.seed = require_field<std::uint64_t>(j, "seed");
  s.config.batch_size = require_field<std::size_t>(j, "batch_size");
  s.config.l2 = require_field<double>(j, "l2");
  return s;
}

Json labels_record(const Theory& t, const Question& q) {
  if (!q.answer || !q.proofs || q.proofs->empty())
    throw DataError("question " + q.id() + " of theory " + t.id + " has no gold answer and proof");
  const EdgeMask m = build_edge_mask(t, q.proofs->front());
  std::vector<int> node_labels(static_cast<std::size_t>(m.layout.size()), 0);
  for (const auto& n : q.proofs->front().nodes) node_labels[static_cast<std::size_t>(m.layout.index_of(n))] = 1;
  Json j;
  j["theory_id"] = t.id;
  j["question_id"] = q.id();
  j["qa_label"] = *q.answer ? 1 : 0;
  j["node_labels"] = node_labels;
  j["edge_labels"] = m.label;
  return j;
}

Json potentials_record(const std::string& theory_id, const std::string& question_id, bool answer,
                       const Potentials& p) {
  Json j;
  j["theory_id"] = theory_id;
  j["question_id"] = question_id;
  j["num_facts"] = p.layout.num_facts;
  j["num_rules"] = p.layout.num_rules;
  j["answer"] = answer;
  j["node_prob"] = p.node_prob;
  j["edge_prob"] = p.edge_prob;
  return j;
}

PotentialsRecord potentials_from_json(const Json& j) {
  PotentialsRecord r;
  r.theory_id = require_field<std::string>(j, "theory_id");
  r.question_id = require_field<std::string>(j, "question_id");
  r.answer = require_field<bool>(j, "answer");
  r.potentials.node_prob = require_field<std::vector<double>>(j, "node_prob");
  r.potentials.edge_prob = require_field<Matrix>(j, "edge_prob");
  r.potentials.layout.num_facts = require_field<int>(j, "num_facts");
  r.potentials.layout.num_rules = require_field<int>(j, "num_rules");
  if (r.potentials.layout.num_facts < 0 || r.potentials.layout.num_rules < 0)
    throw DataError("negative num_facts or num_rules");
  r.potentials.validate();
  return r;
}

}  // namespace ruleproof
