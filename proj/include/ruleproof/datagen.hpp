#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ruleproof/errors.hpp"
#include "ruleproof/jsonl.hpp"
#include "ruleproof/theory.hpp"

namespace ruleproof {

/// Token pools for one surface domain.
struct VocabularyProfile {
  std::string name;
  std::string variable;  // "someone" or "something"
  std::vector<std::string> entities;
  std::vector<std::string> attributes;
  std::vector<std::string> relations;  // verb base forms
};

/// "people", "animals" or "circuits"; throws DataError otherwise.
const VocabularyProfile& vocabulary_profile(const std::string& name);
std::vector<std::string> profile_names();

struct IntRange {
  int min = 0;
  int max = 0;
};

struct GenConfig {
  std::string name = "theory";  // theory id prefix
  std::uint64_t seed = 0;
  int num_theories = 100;
  IntRange facts{2, 10};
  IntRange rules{3, 10};
  int max_depth = 3;
  double negation_rate = 0.2;
  double relation_rate = 0.2;
  int questions_per_theory = 8;
  std::string profile = "people";
  double answer_balance = 0.5;  // fraction of true answers per theory
  int max_retries = 500;

  /// Throws DataError naming the first inconsistent field.
  void validate() const;
};

Json config_to_json(const GenConfig& cfg);
/// Fields absent from `j` keep their defaults.
GenConfig config_from_json(const Json& j);

/// Raised when no theory satisfying the config is found within max_retries.
class GenerationFailed : public DataError {
 public:
  using DataError::DataError;
};

/// One stratified theory with annotated questions. Deterministic in
/// (cfg.seed, index); independent of other indices.
Theory generate_theory(const GenConfig& cfg, std::uint64_t index);

struct Dataset {
  std::vector<Theory> train, dev, test;
  Json manifest;
};

/// Generates cfg.num_theories theories on `threads` workers and splits them
/// 70/10/20 by a seeded shuffle.
Dataset generate_dataset(const GenConfig& cfg, int threads = 1);

}  // namespace ruleproof
