#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mmdb/catalog.hpp"
#include "mmdb/types.hpp"

namespace mmdb {

// Word pools for the synthetic clinical corpus. Facts are functional: each
// diagnosis owns one alias, one treatment, and one symptom, so the planted
// (key, value) pairs are consistent across documents and the bilinear heads
// can learn them from co-occurrence.
struct Vocabulary {
  std::vector<std::string> diagnoses;
  std::map<std::string, std::string> alias_of;
  std::map<std::string, std::string> treatment_of;
  std::map<std::string, std::string> symptom_of;
  std::vector<std::string> first_names;
  std::vector<std::string> last_names;
  std::vector<std::string> specialties;
  std::vector<std::string> distractors;
  // Candidate surface names per logical column, mimicking alias-randomized
  // column headers.
  std::map<std::string, std::vector<std::string>> column_aliases;
};

Vocabulary default_vocabulary();

struct GeneratorConfig {
  uint64_t seed = 0;
  int num_docs = 100;
  TableKind kind = TableKind::MultiRow;
  // Multi-entity documents: with probability concat_prob a document covers
  // 2..max_entities distinct entities instead of one.
  int max_entities = 3;
  double concat_prob = 0.6;
  // Probability that an entity's second key mention uses its alias surface
  // instead of repeating the canonical form.
  double alias_prob = 0.5;
  double distractor_prob = 0.7;
  // 1 = treatment only, 2 = treatment and symptom.
  int dependent_columns = 2;
  bool randomize_column_names = true;
  Vocabulary vocab = default_vocabulary();
};

struct GeneratedCorpus {
  TextCollection collection;
  TextTableDef def;
  std::vector<GoldAnnotation> gold;
};

// Deterministic in config.seed. Every document's annotation is internally
// consistent: reading the planted spans reproduces the gold rows exactly.
GeneratedCorpus generate_corpus(const GeneratorConfig& config);

struct SplitResult {
  TextCollection train;
  TextCollection dev;
  TextCollection test;
};

// Seeded shuffle, then sizes floor(frac * n) for dev and test with the
// remainder going to train. Document order within each part follows the
// original collection.
SplitResult split(const TextCollection& corpus, double train_frac,
                  double dev_frac, double test_frac, uint64_t seed);

// Annotations restricted to the documents of one split part, in gold order.
std::vector<GoldAnnotation> gold_subset(const std::vector<GoldAnnotation>& gold,
                                        const TextCollection& part);

// Structured table, one linked document per row, and the extraction target
// definition used by join tests and demos.
struct JoinCorpus {
  StructuredTable table;
  TextCollection collection;
  LinkMap link;
  TextTableDef def;
  std::vector<GoldAnnotation> gold;
};

JoinCorpus generate_join_corpus(uint64_t seed, int num_rows);

}  // namespace mmdb
