// Synthetic theory generation.
//
// Each theory starts from a planted derivation chain: a base fact and rules
// a_0 => a_1 => ... => a_D for one entity, optionally widened with extra
// fact-supported or negated antecedents. Distractor facts and rules are then
// added one at a time, each kept only if the theory stays stratified,
// consistent, free of rule-derivable facts, and still derives the chain goal.
// Questions are drawn so that gold depths cover 0..D and answers are balanced.

#include "ruleproof/datagen.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "ruleproof/parallel.hpp"
#include "ruleproof/random.hpp"
#include "ruleproof/reasoner.hpp"

namespace ruleproof {

namespace {

const std::vector<VocabularyProfile>& profiles() {
  static const std::vector<VocabularyProfile> all = {
      {"people", "someone",
       {"alan", "bob", "charlie", "dave", "erin", "fiona", "gary", "harry"},
       {"big", "blue", "cold", "furry", "green", "kind", "nice", "quiet", "red", "rough", "round", "smart", "white",
        "young", "high", "rich", "tall", "calm"},
       {"like", "chase", "see", "visit", "need"}},
      {"animals", "something",
       {"the_bear", "the_cat", "the_dog", "the_mouse", "the_lion", "the_rabbit", "the_squirrel", "the_tiger"},
       {"big", "brown", "cold", "cute", "fierce", "furry", "green", "hungry", "kind", "little", "lazy", "loud", "quiet",
        "red", "round", "sleepy", "strong", "young"},
       {"chase", "eat", "see", "visit", "like"}},
      {"circuits", "something",
       {"the_wire", "the_switch", "the_bulb", "the_battery", "the_circuit", "the_fuse", "the_lamp", "the_motor"},
       {"conducting", "broken", "open", "closed", "powered", "metal", "plastic", "lit", "live", "grounded", "insulated",
        "charged", "faulty", "warm", "active", "silent", "shorted", "dim"},
       {"connect", "power", "touch", "feed", "block"}},
  };
  return all;
}

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[uniform_below(rng, v.size())];
}

Literal attr(const std::string& subject, const std::string& predicate, bool positive = true) {
  return Literal{subject, predicate, std::nullopt, positive};
}

// A draft theory under construction, with the checks that gate every change.
class Draft {
 public:
  Draft(const GenConfig& cfg, const VocabularyProfile& vocab, std::mt19937_64& rng)
      : cfg_(cfg), vocab_(vocab), rng_(rng) {
    std::vector<std::string> ents = vocab.entities;
    portable_shuffle(ents.begin(), ents.end(), rng_);
    entities_.assign(ents.begin(), ents.begin() + 4);
    attributes_ = vocab.attributes;
    portable_shuffle(attributes_.begin(), attributes_.end(), rng_);
    relations_ = vocab.relations;
    portable_shuffle(relations_.begin(), relations_.end(), rng_);
    facts_target_ = uniform_int(rng_, cfg.facts.min, cfg.facts.max);
    rules_target_ = uniform_int(rng_, cfg.rules.min, cfg.rules.max);
    while (facts_target_ + rules_target_ > static_cast<int>(kMaxContextSize)) {
      if (facts_target_ > cfg.facts.min) --facts_target_;
      else --rules_target_;
    }
  }

  bool plant_chain() {
    const int depth = cfg_.max_depth;
    if (depth == 0) return true;
    const std::string e0 = entities_[0];
    // attributes 0..depth carry the chain; the rest are for side conditions and distractors
    const std::size_t reserved = static_cast<std::size_t>(depth) + 1;
    std::vector<std::string> side(attributes_.begin() + static_cast<std::ptrdiff_t>(reserved), attributes_.end());
    add_fact(attr(e0, attributes_[0]));
    std::size_t next_side = 0;
    for (int k = 1; k <= depth; ++k) {
      const bool ground = bernoulli(rng_, 0.15);
      const std::string x = ground ? e0 : vocab_.variable;
      Rule r;
      r.antecedents.push_back(attr(x, attributes_[static_cast<std::size_t>(k - 1)]));
      const int budget_facts = facts_target_ - static_cast<int>(t_.facts.size());
      if (bernoulli(rng_, 0.3) && budget_facts > 1 && next_side < side.size()) {
        if (bernoulli(rng_, cfg_.relation_rate)) {
          const std::string verb = relations_[0];
          const std::string other = entities_[1];
          r.antecedents.push_back(Literal{x, verb, other, true});
          add_fact(Literal{e0, verb, other, true});
        } else {
          const std::string& b = side[next_side++];
          r.antecedents.push_back(attr(x, b));
          add_fact(attr(e0, b));
        }
      }
      if (bernoulli(rng_, cfg_.negation_rate) && next_side < side.size()) {
        r.antecedents.push_back(attr(x, side[next_side++], false));
      }
      r.consequent = attr(x, attributes_[static_cast<std::size_t>(k)]);
      t_.rules.push_back(std::move(r));
    }
    goal_ = attr(e0, attributes_[static_cast<std::size_t>(depth)]);
    renumber();
    return acceptable();
  }

  void add_distractors() {
    int attempts = 0;
    while (attempts++ < 200 && (static_cast<int>(t_.facts.size()) < facts_target_ ||
                                static_cast<int>(t_.rules.size()) < rules_target_)) {
      const bool want_fact = static_cast<int>(t_.facts.size()) < facts_target_ &&
                             (static_cast<int>(t_.rules.size()) >= rules_target_ || bernoulli(rng_, 0.5));
      Theory before = t_;
      if (want_fact) t_.facts.push_back(Fact{0, random_ground_literal(true), ""});
      else t_.rules.push_back(random_rule());
      renumber();
      if (!acceptable()) t_ = std::move(before);
    }
  }

  Theory& theory() { return t_; }

 private:
  void add_fact(const Literal& l) { t_.facts.push_back(Fact{0, l, ""}); }

  void renumber() { render_all(t_); }

  const std::string& random_attribute() { return pick(attributes_, rng_); }

  Literal random_ground_literal(bool allow_negative) {
    Literal l;
    l.subject = pick(entities_, rng_);
    if (bernoulli(rng_, cfg_.relation_rate)) {
      l.predicate = pick(relations_, rng_);
      l.object = pick(entities_, rng_);
    } else {
      l.predicate = random_attribute();
    }
    l.positive = !(allow_negative && bernoulli(rng_, cfg_.negation_rate));
    return l;
  }

  Rule random_rule() {
    Rule r;
    const bool ground = bernoulli(rng_, 0.15);
    const std::string x = ground ? pick(entities_, rng_) : vocab_.variable;
    const int n = uniform_int(rng_, 1, 2);
    for (int i = 0; i < n; ++i) {
      Literal a;
      a.subject = x;
      if (bernoulli(rng_, cfg_.relation_rate)) {
        a.predicate = pick(relations_, rng_);
        a.object = pick(entities_, rng_);
      } else {
        a.predicate = random_attribute();
      }
      a.positive = !bernoulli(rng_, cfg_.negation_rate);
      r.antecedents.push_back(std::move(a));
    }
    if (std::none_of(r.antecedents.begin(), r.antecedents.end(), [](const Literal& a) { return a.positive; }) &&
        bernoulli(rng_, 0.5))
      r.antecedents.front().positive = true;
    r.consequent = attr(x, random_attribute());
    return r;
  }

  // Structural validity, stratification, consistency, no rule-derivable
  // facts, and the planted goal still derived.
  bool acceptable() const {
    if (!validate_theory(t_).empty()) return false;
    Closure c;
    try {
      c = closure(t_);
    } catch (const NonStratifiedTheory&) {
      return false;
    }
    for (const auto& f : t_.facts) {
      if (!f.literal.positive && c.derived.count(f.literal.atom())) return false;
      if (f.literal.positive && c.derivation_index.count(f.literal)) return false;
    }
    return !goal_ || c.derived.count(*goal_);
  }

  const GenConfig& cfg_;
  const VocabularyProfile& vocab_;
  std::mt19937_64& rng_;
  Theory t_;
  std::vector<std::string> entities_, attributes_, relations_;
  int facts_target_ = 0, rules_target_ = 0;
  std::optional<Literal> goal_;
};

struct Candidate {
  Literal literal;
  bool answer = false;
  std::vector<ProofGraph> proofs;
  int depth = 0;
};

std::vector<Literal> question_literals(const Theory& t, bool allow_negative) {
  std::set<std::string> attributes, relations;
  auto note = [&](const Literal& l) { (l.is_relation() ? relations : attributes).insert(l.predicate); };
  for (const auto& f : t.facts) note(f.literal);
  for (const auto& r : t.rules) {
    note(r.consequent);
    for (const auto& a : r.antecedents) note(a);
  }
  std::vector<Literal> out;
  const std::set<std::string> ents = theory_entities(t);
  for (const auto& e : ents) {
    for (const auto& a : attributes) out.push_back(attr(e, a));
    for (const auto& r : relations)
      for (const auto& o : ents) out.push_back(Literal{e, r, o, true});
  }
  if (allow_negative) {
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) out.push_back(out[i].negated());
  }
  return out;
}

// Picks questions covering depths 0..D with the configured answer balance.
// Returns false when the theory cannot supply them.
bool select_questions(const GenConfig& cfg, Theory& t, std::mt19937_64& rng) {
  std::vector<Literal> literals = question_literals(t, cfg.negation_rate > 0);
  portable_shuffle(literals.begin(), literals.end(), rng);
  const Closure c = closure(t, {});

  const int total = cfg.questions_per_theory;
  const int want_true = static_cast<int>(std::lround(total * cfg.answer_balance));
  const int want_false = total - want_true;
  std::vector<Candidate> pool;
  for (const auto& l : literals) {
    Question q;
    q.literal = l;
    Candidate cand;
    cand.literal = l;
    cand.answer = answer_question(t, c, l);
    cand.proofs = prove(t, q);
    if (cand.proofs.empty()) continue;
    cand.depth = 0;
    for (const auto& p : cand.proofs) cand.depth = std::max(cand.depth, proof_depth(p));
    if (cand.depth > cfg.max_depth) continue;
    pool.push_back(std::move(cand));
  }

  std::vector<const Candidate*> chosen;
  std::set<const Candidate*> used;
  int n_true = 0, n_false = 0;
  auto take = [&](const Candidate& cand) {
    chosen.push_back(&cand);
    used.insert(&cand);
    (cand.answer ? n_true : n_false)++;
  };
  for (int d = cfg.max_depth; d >= 0; --d) {
    const Candidate* found = nullptr;
    for (bool answer : {true, false}) {
      if ((answer ? n_true >= want_true : n_false >= want_false)) continue;
      for (const auto& cand : pool)
        if (!used.count(&cand) && cand.depth == d && cand.answer == answer) {
          found = &cand;
          break;
        }
      if (found) break;
    }
    if (!found) return false;
    take(*found);
  }
  for (const auto& cand : pool) {
    if (n_true >= want_true && n_false >= want_false) break;
    if (used.count(&cand)) continue;
    if (cand.answer ? n_true < want_true : n_false < want_false) take(cand);
  }
  if (n_true != want_true || n_false != want_false) return false;

  std::stable_sort(chosen.begin(), chosen.end(), [](const Candidate* a, const Candidate* b) { return a->depth < b->depth; });
  t.questions.clear();
  for (const Candidate* cand : chosen) {
    Question q;
    q.literal = cand->literal;
    q.answer = cand->answer;
    q.proofs = cand->proofs;
    q.depth = cand->depth;
    t.questions.push_back(std::move(q));
  }
  render_all(t);
  return true;
}

std::string theory_id(const GenConfig& cfg, std::uint64_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return cfg.name + "-" + digits;
}

Json split_summary(const std::vector<Theory>& theories, int max_depth) {
  std::vector<int> depth_histogram(static_cast<std::size_t>(max_depth) + 1, 0);
  int questions = 0, true_answers = 0;
  for (const auto& t : theories) {
    for (const auto& q : t.questions) {
      ++questions;
      true_answers += q.answer.value_or(false);
      if (q.depth) ++depth_histogram[static_cast<std::size_t>(*q.depth)];
    }
  }
  Json j;
  j["theories"] = theories.size();
  j["questions"] = questions;
  j["depth_histogram"] = depth_histogram;
  j["true_fraction"] = questions ? static_cast<double>(true_answers) / questions : 0.0;
  return j;
}

}  // namespace

const VocabularyProfile& vocabulary_profile(const std::string& name) {
  for (const auto& p : profiles())
    if (p.name == name) return p;
  throw DataError("unknown vocabulary profile '" + name + "'");
}

std::vector<std::string> profile_names() {
  std::vector<std::string> out;
  for (const auto& p : profiles()) out.push_back(p.name);
  return out;
}

void GenConfig::validate() const {
  auto fail = [](const std::string& msg) { throw DataError("invalid generator config: " + msg); };
  if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) fail("name must be a non-empty token");
  if (num_theories < 1) fail("num_theories must be positive");
  if (facts.min < 1 || facts.max < facts.min) fail("facts range must satisfy 1 <= min <= max");
  if (rules.min < 0 || rules.max < rules.min) fail("rules range must satisfy 0 <= min <= max");
  if (facts.min + rules.min > static_cast<int>(kMaxContextSize)) fail("minimum context exceeds 25 sentences");
  if (max_depth < 0 || max_depth > 5) fail("max_depth must lie in 0..5");
  if (max_depth > rules.max) fail("max_depth needs at least that many rules");
  if (max_depth > 0 && facts.max + max_depth > static_cast<int>(kMaxContextSize))
    fail("facts.max plus max_depth exceeds 25 sentences");
  if (negation_rate < 0 || negation_rate > 1) fail("negation_rate must lie in [0,1]");
  if (relation_rate < 0 || relation_rate > 1) fail("relation_rate must lie in [0,1]");
  if (answer_balance < 0 || answer_balance > 1) fail("answer_balance must lie in [0,1]");
  if (questions_per_theory < max_depth + 1) fail("questions_per_theory must be at least max_depth + 1");
  if (max_retries < 1) fail("max_retries must be positive");
  vocabulary_profile(profile);
}

Json config_to_json(const GenConfig& cfg) {
  Json j;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["num_theories"] = cfg.num_theories;
  j["facts"] = {cfg.facts.min, cfg.facts.max};
  j["rules"] = {cfg.rules.min, cfg.rules.max};
  j["max_depth"] = cfg.max_depth;
  j["negation_rate"] = cfg.negation_rate;
  j["relation_rate"] = cfg.relation_rate;
  j["questions_per_theory"] = cfg.questions_per_theory;
  j["profile"] = cfg.profile;
  j["answer_balance"] = cfg.answer_balance;
  j["max_retries"] = cfg.max_retries;
  return j;
}

GenConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw DataError("generator config must be a JSON object");
  static const std::set<std::string> known = {"name", "seed", "num_theories", "facts", "rules", "max_depth",
                                              "negation_rate", "relation_rate", "questions_per_theory", "profile",
                                              "answer_balance", "max_retries"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw DataError("unknown generator config field '" + key + "'");
  GenConfig cfg;
  auto range = [&](const char* key, IntRange& out) {
    if (!j.contains(key)) return;
    const auto v = require_field<std::vector<int>>(j, key);
    if (v.size() != 2) throw DataError(std::string("field '") + key + "' must be [min, max]");
    out = {v[0], v[1]};
  };
  if (j.contains("name")) cfg.name = require_field<std::string>(j, "name");
  if (j.contains("seed")) cfg.seed = require_field<std::uint64_t>(j, "seed");
  if (j.contains("num_theories")) cfg.num_theories = require_field<int>(j, "num_theories");
  range("facts", cfg.facts);
  range("rules", cfg.rules);
  if (j.contains("max_depth")) cfg.max_depth = require_field<int>(j, "max_depth");
  if (j.contains("negation_rate")) cfg.negation_rate = require_field<double>(j, "negation_rate");
  if (j.contains("relation_rate")) cfg.relation_rate = require_field<double>(j, "relation_rate");
  if (j.contains("questions_per_theory")) cfg.questions_per_theory = require_field<int>(j, "questions_per_theory");
  if (j.contains("profile")) cfg.profile = require_field<std::string>(j, "profile");
  if (j.contains("answer_balance")) cfg.answer_balance = require_field<double>(j, "answer_balance");
  if (j.contains("max_retries")) cfg.max_retries = require_field<int>(j, "max_retries");
  return cfg;
}

Theory generate_theory(const GenConfig& cfg, std::uint64_t index) {
  cfg.validate();
  const VocabularyProfile& vocab = vocabulary_profile(cfg.profile);
  std::mt19937_64 rng(derive_seed(cfg.seed, index));
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Draft draft(cfg, vocab, rng);
    if (!draft.plant_chain()) continue;
    draft.add_distractors();
    Theory& t = draft.theory();
    if (t.facts.empty()) continue;
    t.id = theory_id(cfg, index);
    if (!select_questions(cfg, t, rng)) continue;
    if (!validate_theory(t).empty()) throw InvariantError("generated theory " + t.id + " fails validation");
    return t;
  }
  throw GenerationFailed("no theory satisfying the config found for index " + std::to_string(index) + " within " +
                         std::to_string(cfg.max_retries) + " attempts");
}

Dataset generate_dataset(const GenConfig& cfg, int threads) {
  cfg.validate();
  const std::size_t n = static_cast<std::size_t>(cfg.num_theories);
  std::vector<Theory> theories(n);
  parallel_for(n, threads, [&](std::size_t i) { theories[i] = generate_theory(cfg, i); });

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(derive_seed(cfg.seed, 0x5917));
  portable_shuffle(order.begin(), order.end(), rng);
  const std::size_t n_train = n * 70 / 100, n_dev = n * 10 / 100;
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> dev_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                                   order.begin() + static_cast<std::ptrdiff_t>(n_train + n_dev));
  std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_dev), order.end());
  Dataset d;
  for (auto* part : {&train_idx, &dev_idx, &test_idx}) std::sort(part->begin(), part->end());
  for (auto i : train_idx) d.train.push_back(std::move(theories[i]));
  for (auto i : dev_idx) d.dev.push_back(std::move(theories[i]));
  for (auto i : test_idx) d.test.push_back(std::move(theories[i]));

  const VocabularyProfile& vocab = vocabulary_profile(cfg.profile);
  Json m;
  m["config"] = config_to_json(cfg);
  m["splits"] = {{"train", split_summary(d.train, cfg.max_depth)},
                 {"dev", split_summary(d.dev, cfg.max_depth)},
                 {"test", split_summary(d.test, cfg.max_depth)}};
  std::vector<Theory> all;
  for (const auto* part : {&d.train, &d.dev, &d.test}) all.insert(all.end(), part->begin(), part->end());
  m["total"] = split_summary(all, cfg.max_depth);
  m["vocabulary"] = {{"profile", vocab.name},
                     {"variable", vocab.variable},
                     {"entities", vocab.entities},
                     {"attributes", vocab.attributes},
                     {"relations", vocab.relations}};
  m["generation"] = {
      {"entities_per_theory", 4},
      {"chain", "one planted chain of max_depth rules from a single base fact"},
      {"side_antecedent_rate", 0.3},
      {"ground_rule_rate", 0.15},
      {"distractors", "uniform random facts and 1-2 antecedent rules, rejected if they break stratification, "
                      "consistency, fact non-redundancy or the planted chain"},
      {"depth_bucket", "maximum gold proof depth"},
      {"max_proofs", kDefaultMaxProofs}};
  d.manifest = std::move(m);
  return d;
}

}  // namespace ruleproof
