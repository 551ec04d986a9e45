#include "mmdb/loss.hpp"

#include <algorithm>
#include <cmath>

#include "mmdb/error.hpp"

namespace mmdb {

namespace {

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double tagging_loss(const std::vector<TaggingInstance>& batch,
                    const TaggingHead& head, TaggingGrad* grad) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  for (const auto& inst : batch) {
    if (inst.token_reps == nullptr || inst.token_reps->empty())
      throw InvalidArgument("tagging instance without token representations");
    if (inst.gold.size() != inst.token_reps->size())
      throw InvalidArgument("tagging instance has " +
                            std::to_string(inst.gold.size()) + " labels for " +
                            std::to_string(inst.token_reps->size()) + " tokens");

    const auto& tokens = *inst.token_reps;
    const Vec& c = inst.cell_rep;
    Vec wb_c = head.W_B * c;
    Vec wi_c = head.W_I * c;
    const double n = static_cast<double>(tokens.size());

    // Accumulated softmax-gradient weights per class; the matrix gradients
    // factor into (sum of weighted token reps) * cell_rep'.
    Vec gb_sum = Vec::Zero(c.size());
    Vec gi_sum = Vec::Zero(c.size());
    double go_sum = 0.0;

    double inst_loss = 0.0;
    for (size_t t = 0; t < tokens.size(); ++t) {
      double sb = tokens[t].dot(wb_c);
      double si = tokens[t].dot(wi_c);
      double so = head.thresh_O;
      double m = std::max({sb, si, so});
      double eb = std::exp(sb - m);
      double ei = std::exp(si - m);
      double eo = std::exp(so - m);
      double z = eb + ei + eo;
      double pb = eb / z;
      double pi = ei / z;
      double po = eo / z;

      double gold_score = 0.0;
      double gold_p = 0.0;
      switch (inst.gold[t]) {
        case IOBTag::B:
          gold_score = sb;
          gold_p = pb;
          break;
        case IOBTag::I:
          gold_score = si;
          gold_p = pi;
          break;
        case IOBTag::O:
          gold_score = so;
          gold_p = po;
          break;
      }
      (void)gold_score;
      inst_loss += -std::log(std::max(gold_p, 1e-300));

      if (grad != nullptr) {
        double yb = inst.gold[t] == IOBTag::B ? 1.0 : 0.0;
        double yi = inst.gold[t] == IOBTag::I ? 1.0 : 0.0;
        double yo = inst.gold[t] == IOBTag::O ? 1.0 : 0.0;
        gb_sum += (pb - yb) * tokens[t];
        gi_sum += (pi - yi) * tokens[t];
        go_sum += po - yo;
      }
    }
    total += inst_loss / n;

    if (grad != nullptr) {
      double scale = inv_batch / n;
      grad->dW_B += scale * (gb_sum * c.transpose());
      grad->dW_I += scale * (gi_sum * c.transpose());
      grad->dthresh += scale * go_sum;
    }
  }
  return total * inv_batch;
}

double dd_loss(const std::vector<DDPair>& pairs, const DuplicateHead& head,
               DuplicateGrad* grad) {
  if (pairs.empty()) return 0.0;
  double total = 0.0;
  const double inv = 1.0 / static_cast<double>(pairs.size());
  for (const auto& p : pairs) {
    double score = duplicate_score(p.a, p.b, head);
    double z = score - head.thresh;
    // y=1: softplus(-z), y=0: softplus(z); both are the stable forms of the
    // logistic cross-entropy.
    total += p.positive ? softplus(-z) : softplus(z);
    if (grad != nullptr) {
      double dz = sigmoid(z) - (p.positive ? 1.0 : 0.0);
      grad->dW += (inv * dz * 0.5) * (p.a * p.b.transpose() + p.b * p.a.transpose());
      grad->dthresh += -inv * dz;
    }
  }
  return total * inv;
}

CombinedLoss combined_loss(const TrainBatch& batch, const Model& model,
                           const LossWeights& weights, ModelGrad* grad) {
  if (batch.mcr.empty() && batch.cta.empty() && batch.dd.empty())
    throw InvalidArgument("combined loss over an entirely empty batch");

  CombinedLoss out;
  if (grad != nullptr) {
    TaggingGrad span = TaggingGrad::zero(model.encoder.dim);
    TaggingGrad column = TaggingGrad::zero(model.encoder.dim);
    DuplicateGrad dd = DuplicateGrad::zero(model.encoder.dim);
    out.mcr = tagging_loss(batch.mcr, model.span_detect, &span);
    out.cta = tagging_loss(batch.cta, model.column_detect, &column);
    out.dd = dd_loss(batch.dd, model.duplicate_detect, &dd);
    grad->span.dW_B += weights.mcr * span.dW_B;
    grad->span.dW_I += weights.mcr * span.dW_I;
    grad->span.dthresh += weights.mcr * span.dthresh;
    grad->column.dW_B += weights.cta * column.dW_B;
    grad->column.dW_I += weights.cta * column.dW_I;
    grad->column.dthresh += weights.cta * column.dthresh;
    grad->dd.dW += weights.dd * dd.dW;
    grad->dd.dthresh += weights.dd * dd.dthresh;
  } else {
    out.mcr = tagging_loss(batch.mcr, model.span_detect);
    out.cta = tagging_loss(batch.cta, model.column_detect);
    out.dd = dd_loss(batch.dd, model.duplicate_detect);
  }
  out.total = weights.mcr * out.mcr + weights.cta * out.cta + weights.dd * out.dd;
  return out;
}

}  // namespace mmdb
