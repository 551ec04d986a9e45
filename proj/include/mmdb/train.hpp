#pragma once

#include <vector>

#include "mmdb/encoder.hpp"
#include "mmdb/heads.hpp"
#include "mmdb/loss.hpp"
#include "mmdb/types.hpp"

namespace mmdb {

struct TrainConfig {
  int epochs = 30;
  double lr = 0.1;
  uint64_t seed = 0;
  // Probability that an annotated cell is masked and becomes a value
  // reconstruction target; when a row ends up with nothing masked, one
  // eligible cell is forced.
  double mask_cell_prob = 0.3;
  // Probability that a slot hides its column name for one step.
  double mask_name_prob = 0.15;
  // Sampled non-duplicate pairs per planted duplicate pair.
  int dd_negatives_per_positive = 2;
  LossWeights weights;
};

struct TrainResult {
  Model model;
  std::vector<double> epoch_losses;  // mean per-document combined loss
};

// Trains the three heads by stochastic gradient descent: one step per
// document per epoch, documents visited in a seeded permutation that is
// re-drawn every epoch. The batch of one document holds the masked-cell
// reconstruction instances of its rows, one column-level instance per
// column, and the duplicate pairs planted in its annotation. Throws
// InvalidCorpus when the annotations carry no span labels at all.
TrainResult train(const TextCollection& collection, const TextTableDef& def,
                  const std::vector<GoldAnnotation>& gold,
                  const Encoder& encoder, const TrainConfig& config);

}  // namespace mmdb
