#pragma once

#include <vector>

#include "mmdb/heads.hpp"

namespace mmdb {

// Training relaxes the hard argmax of the tagger into a three-way softmax
// whose class-O logit is the learned threshold, so the cross-entropy
// gradient trains the two matrices and the threshold jointly. The duplicate
// head trains with logistic loss on (score - threshold).

// One tagging example: every token of an encoding labeled against one cell.
// `token_reps` is a non-owning pointer; the caller keeps the encoding alive
// for the lifetime of the instance.
struct TaggingInstance {
  const std::vector<Vec>* token_reps = nullptr;
  Vec cell_rep;
  std::vector<IOBTag> gold;
};

struct DDPair {
  Vec a;
  Vec b;
  bool positive = false;
};

struct TaggingGrad {
  Mat dW_B;
  Mat dW_I;
  double dthresh = 0.0;

  static TaggingGrad zero(int dim) {
    return TaggingGrad{Mat::Zero(dim, dim), Mat::Zero(dim, dim), 0.0};
  }
};

struct DuplicateGrad {
  Mat dW;
  double dthresh = 0.0;

  static DuplicateGrad zero(int dim) {
    return DuplicateGrad{Mat::Zero(dim, dim), 0.0};
  }
};

struct ModelGrad {
  TaggingGrad span;
  TaggingGrad column;
  DuplicateGrad dd;

  static ModelGrad zero(int dim) {
    return ModelGrad{TaggingGrad::zero(dim), TaggingGrad::zero(dim),
                     DuplicateGrad::zero(dim)};
  }
};

// Mean token-level cross-entropy over the batch; per instance the mean is
// over its tokens. Gradients, when requested, are accumulated into `grad`.
// An empty batch has loss 0 and leaves `grad` untouched.
double tagging_loss(const std::vector<TaggingInstance>& batch,
                    const TaggingHead& head, TaggingGrad* grad = nullptr);

// Mean logistic cross-entropy of sigmoid(score - thresh) against the pair
// labels. An empty batch has loss 0.
double dd_loss(const std::vector<DDPair>& pairs, const DuplicateHead& head,
               DuplicateGrad* grad = nullptr);

struct LossWeights {
  double mcr = 300.0;
  double cta = 80.0;
  double dd = 1.0;
};

struct TrainBatch {
  std::vector<TaggingInstance> mcr;  // scored by span_detect
  std::vector<TaggingInstance> cta;  // scored by column_detect
  std::vector<DDPair> dd;
};

struct CombinedLoss {
  double total = 0.0;
  double mcr = 0.0;
  double cta = 0.0;
  double dd = 0.0;
};

// total = weights.mcr * mcr + weights.cta * cta + weights.dd * dd. Throws
// InvalidArgument when every sub-batch is empty.
CombinedLoss combined_loss(const TrainBatch& batch, const Model& model,
                           const LossWeights& weights,
                           ModelGrad* grad = nullptr);

}  // namespace mmdb
