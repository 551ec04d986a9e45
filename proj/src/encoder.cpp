#include "mmdb/encoder.hpp"

#include <random>

#include "mmdb/error.hpp"
#include "mmdb/hash.hpp"
#include "mmdb/tokenizer.hpp"

namespace mmdb {

namespace {

// Surfaces that can never collide with tokenizer output; real tokens are
// either word runs or single punctuation characters, so a multi-character
// string starting with a control byte is safe.
const char* kMaskKey = "\x01mask";

// Pseudo-random unit vector fully determined by (key, dim). Components are
// drawn from the top 53 bits of a mersenne twister, which the standard pins
// down exactly, so the result is identical across platforms.
Vec random_unit_vec(uint64_t key, int dim) {
  std::mt19937_64 rng(key);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) {
    double u = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
    v[i] = 2.0 * u - 1.0;
  }
  double n = v.norm();
  if (n == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / n;
}

}  // namespace

Vec l2_normalize(const Vec& v) {
  double n = v.norm();
  if (n == 0.0) return v;
  return v / n;
}

Vec column_representation(const std::vector<Vec>& reps) {
  if (reps.empty())
    throw InvalidArgument("column representation of an empty cell set");
  Vec sum = Vec::Zero(reps.front().size());
  for (const auto& r : reps) sum += r;
  sum /= static_cast<double>(reps.size());
  return l2_normalize(sum);
}

std::vector<std::vector<Vec>> Encoder::encode_example_cells(
    const std::vector<ColumnSlot>& slot_template,
    const std::vector<Row>& rows) const {
  // One batched pass: a single invocation regardless of the row count.
  ++calls_;
  ++example_calls_;
  std::vector<std::vector<Vec>> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<ColumnSlot> slots = slot_template;
    for (auto& s : slots) {
      auto it = row.find(s.column.name);
      if (it != row.end())
        s.value = it->second.output_text();
      else
        s.value.reset();
    }
    out.push_back(do_encode_cells(slots));
  }
  return out;
}

ReferenceEncoder::ReferenceEncoder(EncoderConfig config) : Encoder(config.dim), config_(config) {
  if (config_.dim < 8)
    throw ConfigError("encoder dimension must be at least 8, got " +
                      std::to_string(config_.dim));
}

Vec ReferenceEncoder::token_embedding(const std::string& surface) const {
  uint64_t key = hash_mix(fnv1a64(surface), config_.seed);
  return random_unit_vec(key, config_.dim);
}

// Pooled mean of every value-token embedding across provided slots. Zero
// when nothing is provided.
Vec ReferenceEncoder::provided_context(const std::vector<ColumnSlot>& slots) const {
  Vec sum = Vec::Zero(config_.dim);
  int count = 0;
  for (const auto& s : slots) {
    if (s.masked()) continue;
    for (const auto& t : tokenize(*s.value)) {
      sum += token_embedding(t.surface);
      ++count;
    }
  }
  if (count == 0) return sum;
  return sum / static_cast<double>(count);
}

Vec ReferenceEncoder::cell_rep(const ColumnSlot& slot, const Vec* context) const {
  std::vector<Vec> parts;
  if (slot.mask_name) {
    parts.push_back(token_embedding(kMaskKey));
  } else {
    std::string name = slot.table_prefix.empty()
                           ? slot.column.name
                           : slot.table_prefix + " " + slot.column.name;
    for (const auto& t : tokenize(name)) parts.push_back(token_embedding(t.surface));
    if (parts.empty()) parts.push_back(token_embedding(kMaskKey));
  }
  parts.push_back(token_embedding(std::string("\x01dtype:") + dtype_name(slot.column.dtype)));
  if (slot.masked()) {
    parts.push_back(token_embedding(kMaskKey));
  } else {
    for (const auto& t : tokenize(*slot.value))
      parts.push_back(token_embedding(t.surface));
  }

  Vec base = Vec::Zero(config_.dim);
  for (const auto& p : parts) base += p;
  base /= static_cast<double>(parts.size());

  // Masked cells blend in the values provided by sibling slots, which is
  // what lets a second extraction pass condition on an already known key.
  if (slot.masked() && context != nullptr && context->norm() > 0.0)
    base += config_.mix_weight * l2_normalize(*context);

  return l2_normalize(base);
}

EncodingResult ReferenceEncoder::do_encode(const Document& doc,
                                           const std::vector<ColumnSlot>& slots) const {
  if (doc.tokens.empty())
    throw InvalidArgument("cannot encode document '" + doc.id +
                          "' with no tokens");

  const size_t n = doc.tokens.size();
  std::vector<Vec> embeddings(n);
  for (size_t i = 0; i < n; ++i)
    embeddings[i] = token_embedding(doc.tokens[i].surface);

  EncodingResult out;
  out.token_reps.resize(n);
  for (size_t i = 0; i < n; ++i) {
    Vec mixed = embeddings[i];
    if (i > 0) mixed += config_.mix_weight * embeddings[i - 1];
    if (i + 1 < n) mixed += config_.mix_weight * embeddings[i + 1];
    out.token_reps[i] = l2_normalize(mixed);
  }

  out.cell_reps = do_encode_cells(slots);
  return out;
}

std::vector<Vec> ReferenceEncoder::do_encode_cells(
    const std::vector<ColumnSlot>& slots) const {
  Vec ctx = provided_context(slots);
  std::vector<Vec> reps;
  reps.reserve(slots.size());
  for (const auto& s : slots) reps.push_back(cell_rep(s, &ctx));
  return reps;
}

const std::vector<std::vector<Vec>>& ExampleEncodingCache::get(
    const Encoder& enc, const std::vector<ColumnSlot>& slot_template,
    const std::vector<Row>& rows) {
  uint64_t h = fnv1a64("examples");
  for (const auto& s : slot_template) {
    h = fnv1a64(s.column.name, h);
    h = fnv1a64(dtype_name(s.column.dtype), h);
    h = fnv1a64(s.table_prefix, h);
    h = hash_mix(h, s.mask_name ? 1 : 0);
  }
  for (const auto& row : rows) {
    h = fnv1a64("\x1e", h);
    for (const auto& [col, cell] : row) {
      h = fnv1a64(col, h);
      h = fnv1a64("\x1f", h);
      h = fnv1a64(cell.output_text(), h);
    }
  }
  std::string key = hash_hex(h);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto [pos, inserted] = cache_.emplace(key, enc.encode_example_cells(slot_template, rows));
  return pos->second;
}

ColumnSlot slot_for(const TextTableDef& def, const std::string& member,
                    const ColumnDef& col) {
  ColumnSlot s;
  s.column = col;
  if (def.kind == TableKind::MultiTable && col.identifying)
    s.table_prefix = member;
  return s;
}

EncodingResult encode_with_examples(const Encoder& enc, const Document& doc,
                                    const std::vector<ColumnSlot>& slots,
                                    const std::vector<Row>& example_rows,
                                    ExampleEncodingCache* cache) {
  EncodingResult result = enc.encode(doc, slots);
  if (example_rows.empty()) return result;

  ExampleEncodingCache local;
  ExampleEncodingCache& store = cache ? *cache : local;
  const auto& example_reps = store.get(enc, slots, example_rows);

  for (size_t j = 0; j < slots.size(); ++j) {
    if (!slots[j].masked()) continue;
    std::vector<Vec> pool;
    for (size_t r = 0; r < example_rows.size(); ++r) {
      if (example_rows[r].count(slots[j].column.name))
        pool.push_back(example_reps[r][j]);
    }
    if (pool.empty()) continue;
    pool.push_back(result.cell_reps[j]);
    result.cell_reps[j] = column_representation(pool);
  }
  return result;
}

}  // namespace mmdb
