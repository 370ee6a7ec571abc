#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "ruleproof/jsonl.hpp"
#include "ruleproof/proof_graph.hpp"
#include "ruleproof/theory.hpp"

namespace ruleproof {

/// Label value for cells excluded from training and decoding.
inline constexpr int kMasked = -100;

/// Row/column order of node vectors and edge matrices: F1..Fn, R1..Rm, NAF.
struct NodeLayout {
  int num_facts = 0;
  int num_rules = 0;

  static NodeLayout of(const Theory& t) {
    return {static_cast<int>(t.facts.size()), static_cast<int>(t.rules.size())};
  }

  int size() const { return num_facts + num_rules + 1; }
  int naf_index() const { return num_facts + num_rules; }
  bool is_rule(int i) const { return i >= num_facts && i < num_facts + num_rules; }
  /// Throws DataError when `n` lies outside the layout.
  int index_of(const ProofNode& n) const;
  ProofNode node_at(int i) const;

  bool operator==(const NodeLayout&) const = default;
};

/// Whether an edge i->j is admissible between two present nodes: distinct
/// endpoints and a rule target. Sources may be facts, rules or NAF.
inline bool edge_type_allowed(const NodeLayout& layout, int i, int j) { return i != j && layout.is_rule(j); }

using Matrix = std::vector<std::vector<double>>;

struct EdgeMask {
  NodeLayout layout;
  std::vector<std::vector<int>> label;  // 0, 1 or kMasked

  std::size_t unmasked_count() const;
};

/// Training labels for one gold proof. Throws DataError on ids unknown to `t`.
EdgeMask build_edge_mask(const Theory& t, const ProofGraph& gold);

/// Gold edges recovered from the 1-cells of a mask.
std::vector<ProofEdge> edges_from_mask(const EdgeMask& mask);

struct Potentials {
  NodeLayout layout;
  std::vector<double> node_prob;  // size() entries, NAF last
  Matrix edge_prob;               // size() x size(); diagonal ignored

  /// Throws DataError unless shapes agree and every entry is finite in [0,1].
  void validate() const;
};

/// Indicator potentials perturbed by u ~ U[0, 2*noise] per node and
/// v ~ U[0, 2*noise] per ordered pair, drawn in row-major order from a
/// mt19937_64 seeded with `seed`. Gold entries get 1-u (1-v), others u (v).
/// Requires 0 <= noise < 0.5.
Potentials oracle_potentials(const Theory& t, const ProofGraph& gold, double noise, std::uint64_t seed);

/// Oracle potentials (noise `noise`) with one bridge edge of the gold proof
/// lowered to 0.5 - delta, so its unconstrained decode is disconnected.
/// Returns the plain oracle potentials when the gold proof has no bridge.
Potentials adversarial_potentials(const Theory& t, const ProofGraph& gold, double noise, double delta,
                                  std::uint64_t seed);

inline constexpr std::size_t kNumFeatures = 9;

struct FeatureVector {
  double unigram_jaccard = 0;
  double bigram_jaccard = 0;
  double normalized_length_difference = 0;
  bool source_has_negation = false;
  bool target_has_negation = false;
  bool fact_to_rule = false;
  bool rule_to_rule = false;
  bool naf_to_rule = false;
  // Overlap of the source's conclusion (a whole fact, or a rule's "then"
  // part) with the target's "if" part; the only direction-aware feature.
  double conclusion_condition_jaccard = 0;

  std::array<double, kNumFeatures> values() const;
};

/// Lower-cased, punctuation-free tokens.
std::vector<std::string> lexical_tokens(const std::string& text);

/// Set-based overlap of two token lists; 0 when both are empty.
double unigram_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);
double bigram_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Features for the candidate edge src->dst. Throws DataError unless dst is
/// a rule of `t` and src is a different fact, rule or NAF.
FeatureVector lexical_edge_features(const Theory& t, const ProofNode& src, const ProofNode& dst);

struct TrainConfig {
  double learning_rate = 2.0;
  int epochs = 1000;
  std::uint64_t seed = 1;
  std::size_t batch_size = 0;  // 0 means full batch
  double l2 = 0.0;
};

struct LabeledEdge {
  FeatureVector features;
  int label = 0;
};

struct LinearScorer {
  std::array<double, kNumFeatures> weights{};
  double bias = 0;
  TrainConfig config;

  double probability(const FeatureVector& f) const;
  bool predict(const FeatureVector& f) const { return probability(f) > 0.5; }
};

/// Mean logistic loss plus l2/2 * |w|^2.
double logistic_loss(const LinearScorer& s, const std::vector<LabeledEdge>& data);
/// Gradient of logistic_loss: kNumFeatures weight entries followed by the bias.
std::vector<double> loss_gradient(const LinearScorer& s, const std::vector<LabeledEdge>& data);

/// Gradient descent from zero weights. `loss_history`, when given, receives
/// the full-data loss after every epoch. Throws DataError on an empty set or
/// non-finite features.
LinearScorer fit_linear_scorer(const std::vector<LabeledEdge>& train, const TrainConfig& config,
                               std::vector<double>* loss_history = nullptr);

/// Labeled unmasked cells of the first gold proof of `q` (none without gold).
std::vector<LabeledEdge> labeled_edges(const Theory& t, const Question& q);

/// Fraction of `data` the scorer labels correctly; 0 for empty data.
double edge_accuracy(const LinearScorer& s, const std::vector<LabeledEdge>& data);

/// Baseline potentials: sentence nodes from the first gold proof, NAF from
/// the fraction of negative antecedents in the theory, and every admissible
/// edge scored by `s`.
Potentials lexical_potentials(const Theory& t, const Question& q, const LinearScorer& s);

Json scorer_to_json(const LinearScorer& s);
LinearScorer scorer_from_json(const Json& j);

/// `.labels.jsonl` record for a question with gold answer and proofs.
Json labels_record(const Theory& t, const Question& q);

/// `.potentials.jsonl` record; `answer` is carried through to decoding.
Json potentials_record(const std::string& theory_id, const std::string& question_id, bool answer,
                       const Potentials& p);

struct PotentialsRecord {
  std::string theory_id;
  std::string question_id;
  bool answer = false;
  Potentials potentials;
};
PotentialsRecord potentials_from_json(const Json& j);

}  // namespace ruleproof
