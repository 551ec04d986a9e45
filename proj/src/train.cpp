#include "mmdb/train.hpp"

#include <deque>
#include <map>
#include <random>
#include <set>

#include "mmdb/error.hpp"
#include "mmdb/gold_align.hpp"
#include "mmdb/hash.hpp"
#include "mmdb/tokenizer.hpp"

namespace mmdb {

namespace {

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

// All annotated ranges of a document with their entity group: explicit
// duplicate groups keep their index, every other range is its own singleton.
struct RangedEntity {
  CharRange range;
  long group;
};

std::vector<RangedEntity> entity_ranges(const GoldAnnotation& gold) {
  std::vector<RangedEntity> out;
  long next_singleton = static_cast<long>(gold.dup_groups.size());
  std::set<CharRange> seen;
  for (const auto& [key, ranges] : gold.spans) {
    for (const auto& r : ranges) {
      if (!seen.insert(r).second) continue;
      long g = dup_group_of(gold, r);
      out.push_back(RangedEntity{r, g >= 0 ? g : next_singleton++});
    }
  }
  return out;
}

}  // namespace

TrainResult train(const TextCollection& collection, const TextTableDef& def,
                  const std::vector<GoldAnnotation>& gold,
                  const Encoder& encoder, const TrainConfig& config) {
  validate_def(def);
  if (config.epochs < 1) throw InvalidArgument("epochs must be positive");
  if (gold.empty()) throw InvalidCorpus("training needs annotated documents");

  std::map<std::string, const GoldAnnotation*> gold_by_doc;
  bool any_spans = false;
  for (const auto& g : gold) {
    if (collection.find(g.doc_id) == nullptr)
      throw InvalidCorpus("annotation references document '" + g.doc_id +
                          "' that is not in collection '" + collection.name +
                          "'");
    gold_by_doc[g.doc_id] = &g;
    any_spans |= !g.spans.empty();
  }
  if (!any_spans)
    throw InvalidCorpus("training needs span labels in the annotations");

  // Documents in collection order that actually carry annotations.
  std::vector<const Document*> docs;
  for (const auto& d : collection.documents)
    if (gold_by_doc.count(d.id)) docs.push_back(&d);
  if (docs.empty())
    throw InvalidCorpus("no annotated document is present in the collection");

  const std::vector<std::string> members = member_tables(def);

  Model model = init_model(
      EncoderConfig{/*seed=*/0, encoder.dim(), /*mix_weight=*/0.5},
      config.seed);
  // The encoder configuration travels with the model; when the encoder is
  // the deterministic reference implementation its settings are recovered so
  // a loaded model rebuilds the identical encoder.
  if (const auto* ref = dynamic_cast<const ReferenceEncoder*>(&encoder))
    model.encoder = ref->config();
  else
    model.encoder = EncoderConfig{0, encoder.dim(), 0.5};

  TrainResult result;
  result.epoch_losses.reserve(static_cast<size_t>(config.epochs));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    uint64_t epoch_key = hash_mix(hash_mix(config.seed, 0x5e0cull), static_cast<uint64_t>(epoch));
    std::mt19937_64 order_rng(epoch_key);
    std::vector<size_t> order(docs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t i = order.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(order_rng() % i);
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss = 0.0;
    size_t steps = 0;

    for (size_t pos = 0; pos < order.size(); ++pos) {
      const Document& doc = *docs[order[pos]];
      const GoldAnnotation& ann = *gold_by_doc.at(doc.id);
      if (doc.tokens.empty()) continue;

      std::mt19937_64 rng(hash_mix(hash_mix(epoch_key, fnv1a64(doc.id)), 0xd0cull));

      // Encodings must outlive the batch; instances point into them, so the
      // container must keep references stable while it grows.
      std::deque<EncodingResult> encodings;
      TrainBatch batch;

      for (const auto& member : members) {
        const std::vector<ColumnDef> cols = table_columns(def, member);
        auto rows_it = ann.tables.find(member);
        const std::vector<GoldRow>* rows =
            rows_it == ann.tables.end() ? nullptr : &rows_it->second;

        // Cell representations per column across this member's rows, for the
        // column-level instances.
        std::vector<std::vector<Vec>> column_pools(cols.size());

        if (rows != nullptr) {
          for (const auto& row : *rows) {
            std::vector<ColumnSlot> slots;
            std::vector<int> maskable;  // slot index
            std::vector<std::vector<CharRange>> cell_ranges(cols.size());
            for (size_t ci = 0; ci < cols.size(); ++ci) {
              ColumnSlot s = slot_for(def, member, cols[ci]);
              auto cell = row.cells.find(cols[ci].name);
              if (cell != row.cells.end()) {
                s.value = cell->second;
                cell_ranges[ci] = ranges_for_cell(doc, ann, span_key(def, cols[ci]),
                                                  cell->second);
                if (!cell_ranges[ci].empty())
                  maskable.push_back(static_cast<int>(ci));
              }
              slots.push_back(std::move(s));
            }

            std::vector<int> masked;
            for (int ci : maskable)
              if (unit_draw(rng) < config.mask_cell_prob) masked.push_back(ci);
            if (masked.empty() && !maskable.empty())
              masked.push_back(maskable[rng() % maskable.size()]);
            for (int ci : masked) slots[static_cast<size_t>(ci)].value.reset();
            for (auto& s : slots)
              if (unit_draw(rng) < config.mask_name_prob) s.mask_name = true;

            encodings.push_back(encoder.encode(doc, slots));
            const EncodingResult& enc = encodings.back();
            for (size_t ci = 0; ci < cols.size(); ++ci)
              column_pools[ci].push_back(enc.cell_reps[ci]);

            for (int ci : masked) {
              TaggingInstance inst;
              inst.token_reps = &enc.token_reps;
              inst.cell_rep = enc.cell_reps[static_cast<size_t>(ci)];
              inst.gold = tags_from_ranges(doc, cell_ranges[static_cast<size_t>(ci)]);
              batch.mcr.push_back(std::move(inst));
            }
          }
        }

        if (!column_pools.empty() && !column_pools.front().empty()) {
          // Token representations for the column-level instances come from
          // the first row encoding of this member.
          const EncodingResult& enc = encodings[encodings.size() - column_pools.front().size()];
          for (size_t ci = 0; ci < cols.size(); ++ci) {
            TaggingInstance inst;
            inst.token_reps = &enc.token_reps;
            inst.cell_rep = column_representation(column_pools[ci]);
            auto sp = ann.spans.find(span_key(def, cols[ci]));
            inst.gold = tags_from_ranges(
                doc, sp == ann.spans.end() ? std::vector<CharRange>{} : sp->second);
            batch.cta.push_back(std::move(inst));
          }
        }
      }

      // Duplicate pairs need token representations; reuse the first encoding
      // or make a bare one when the document produced no row encodings.
      if (!ann.spans.empty()) {
        if (encodings.empty()) encodings.push_back(encoder.encode(doc, {}));
        const EncodingResult& enc = encodings.front();

        std::vector<RangedEntity> entities = entity_ranges(ann);
        std::vector<Vec> reps(entities.size());
        for (size_t i = 0; i < entities.size(); ++i) {
          auto [first, last] = token_range_for(doc, entities[i].range);
          reps[i] = span_representation(enc, first, last);
        }

        size_t positives = 0;
        for (size_t i = 0; i < entities.size(); ++i) {
          for (size_t j = i + 1; j < entities.size(); ++j) {
            if (entities[i].group == entities[j].group) {
              batch.dd.push_back(DDPair{reps[i], reps[j], true});
              ++positives;
            }
          }
        }
        size_t want_negatives =
            positives > 0
                ? positives * static_cast<size_t>(config.dd_negatives_per_positive)
                : std::min<size_t>(entities.size(), 4);
        size_t tries = 0;
        size_t found = 0;
        while (found < want_negatives && tries < want_negatives * 20 + 20 &&
               entities.size() >= 2) {
          ++tries;
          size_t i = rng() % entities.size();
          size_t j = rng() % entities.size();
          if (i == j || entities[i].group == entities[j].group) continue;
          batch.dd.push_back(DDPair{reps[i], reps[j], false});
          ++found;
        }
      }

      if (batch.mcr.empty() && batch.cta.empty() && batch.dd.empty()) continue;

      ModelGrad grad = ModelGrad::zero(model.encoder.dim);
      CombinedLoss loss = combined_loss(batch, model, config.weights, &grad);

      model.span_detect.W_B -= config.lr * grad.span.dW_B;
      model.span_detect.W_I -= config.lr * grad.span.dW_I;
      model.span_detect.thresh_O -= config.lr * grad.span.dthresh;
      model.column_detect.W_B -= config.lr * grad.column.dW_B;
      model.column_detect.W_I -= config.lr * grad.column.dW_I;
      model.column_detect.thresh_O -= config.lr * grad.column.dthresh;
      model.duplicate_detect.W -= config.lr * grad.dd.dW;
      model.duplicate_detect.thresh -= config.lr * grad.dd.dthresh;

      epoch_loss += loss.total;
      ++steps;
    }

    result.epoch_losses.push_back(steps == 0 ? 0.0 : epoch_loss / static_cast<double>(steps));
  }

  result.model = std::move(model);
  return result;
}

}  // namespace mmdb
