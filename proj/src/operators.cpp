#include "mmdb/operators.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>

#include "mmdb/error.hpp"
#include "mmdb/hash.hpp"
#include "mmdb/tokenizer.hpp"

namespace mmdb {

namespace {

// Output columns of one scan, the positions of its key columns in
// identifying-attribute order, and one masked slot per column.
struct ScanPlan {
  std::vector<ColumnDef> cols;
  std::vector<size_t> key_idx;
  std::vector<ColumnSlot> slots;
};

ScanPlan plan_scan(const TextTableDef& def, const std::string& member,
                   const std::vector<std::string>& query_attrs) {
  std::vector<ColumnDef> available = table_columns(def, member);
  for (const auto& a : query_attrs) {
    bool known = false;
    for (const auto& c : available) known |= c.name == a;
    if (!known)
      throw PlanError("table '" + member + "' has no attribute '" + a + "'");
  }

  std::set<std::string> wanted(query_attrs.begin(), query_attrs.end());
  ScanPlan plan;
  for (const auto& c : available) {
    if (!query_attrs.empty() && !wanted.count(c.name) && !c.identifying)
      continue;
    plan.cols.push_back(c);
    plan.slots.push_back(slot_for(def, member, c));
  }
  for (const auto& k : def.identifying_attrs)
    for (size_t i = 0; i < plan.cols.size(); ++i)
      if (plan.cols[i].name == k) plan.key_idx.push_back(i);
  return plan;
}

// Carries the encoder, heads, optional example enrichment, and the running
// counters through one operator call.
struct ScanEnv {
  const Encoder& enc;
  const Model& model;
  const std::vector<Row>* examples = nullptr;
  ExampleEncodingCache* cache = nullptr;
  ExtractionStats stats;

  ScanEnv(const Encoder& e, const Model& m) : enc(e), model(m) {}

  EncodingResult encode(const Document& doc, const std::vector<ColumnSlot>& slots) {
    if (examples != nullptr && !examples->empty())
      return encode_with_examples(enc, doc, slots, *examples, cache);
    return enc.encode(doc, slots);
  }
};

CellValue to_cell(const Document& doc, const SpanCandidate& span) {
  return CellValue{span.surface, Provenance{doc.id, span.range}, std::nullopt};
}

std::vector<SpanCandidate> detect_slot_spans(const EncodingResult& er, size_t slot,
                                             const TaggingHead& head,
                                             const Document& doc) {
  return decode_spans(tag_sequence(er, slot, head), doc);
}

// Clusters candidate spans by the duplicate head. decode_spans yields spans
// in document order, so the clusters come back ordered by first mention.
std::vector<std::vector<size_t>> dedup_groups(const EncodingResult& er,
                                              const std::vector<SpanCandidate>& spans,
                                              const DuplicateHead& head) {
  std::vector<Vec> reps;
  reps.reserve(spans.size());
  for (const auto& s : spans)
    reps.push_back(span_representation(er, s.tok_begin, s.tok_end));
  return cluster_duplicates(reps, head);
}

// Tags every masked slot of the plan and fills the row with the first span
// found per column. `dedup` additionally merges duplicate candidates before
// choosing, which only the multi-row phases ask for.
void extract_masked_cells(ScanEnv& env, const Document& doc, const ScanPlan& plan,
                          const std::vector<ColumnSlot>& slots, bool dedup,
                          Row& row) {
  EncodingResult er = env.encode(doc, slots);
  for (size_t j = 0; j < plan.cols.size(); ++j) {
    if (!slots[j].masked()) continue;
    auto spans = detect_slot_spans(er, j, env.model.span_detect, doc);
    env.stats.spans_extracted += spans.size();
    if (spans.empty()) continue;
    if (dedup) {
      auto groups = dedup_groups(er, spans, env.model.duplicate_detect);
      env.stats.duplicates_merged += spans.size() - groups.size();
      row[plan.cols[j].name] = to_cell(doc, spans[groups.front().front()]);
    } else {
      row[plan.cols[j].name] = to_cell(doc, spans.front());
    }
  }
}

// One detected key value: the surface of the first mention of its
// duplicate cluster.
struct KeyValue {
  std::string surface;
  Provenance prov;
};

std::vector<KeyValue> detect_key_values(ScanEnv& env, const EncodingResult& er,
                                        const Document& doc, size_t slot,
                                        const TaggingHead& head) {
  auto spans = detect_slot_spans(er, slot, head, doc);
  env.stats.spans_extracted += spans.size();
  auto groups = dedup_groups(er, spans, env.model.duplicate_detect);
  env.stats.duplicates_merged += spans.size() - groups.size();
  std::vector<KeyValue> keys;
  keys.reserve(groups.size());
  for (const auto& g : groups) {
    const SpanCandidate& first = spans[g.front()];
    keys.push_back({first.surface, Provenance{doc.id, first.range}});
  }
  return keys;
}

void require_kind(const TextTableDef& def, TableKind kind, const char* op) {
  if (def.kind != kind)
    throw PlanError(std::string(op) + " requires a " + kind_name(kind) +
                    " definition, but table '" + def.name + "' is " +
                    kind_name(def.kind));
}

std::vector<Row> basic_rows(ScanEnv& env, const TextCollection& coll,
                            const ScanPlan& plan) {
  std::vector<Row> rows;
  rows.reserve(coll.documents.size());
  for (const auto& doc : coll.documents) {
    Row row;
    extract_masked_cells(env, doc, plan, plan.slots, false, row);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Row> multirow_rows(ScanEnv& env, const TextCollection& coll,
                               const ScanPlan& plan) {
  const size_t key = plan.key_idx.front();
  std::vector<Row> rows;
  for (const auto& doc : coll.documents) {
    EncodingResult er = env.encode(doc, plan.slots);
    auto keys = detect_key_values(env, er, doc, key, env.model.column_detect);
    for (const auto& kv : keys) {
      std::vector<ColumnSlot> slots = plan.slots;
      slots[key].value = kv.surface;
      Row row;
      row[plan.cols[key].name] = CellValue{kv.surface, kv.prov, std::nullopt};
      extract_masked_cells(env, doc, plan, slots, true, row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<Row> composite_rows(ScanEnv& env, const TextCollection& coll,
                                const ScanPlan& plan) {
  const auto& keys = plan.key_idx;
  std::vector<Row> rows;
  for (const auto& doc : coll.documents) {
    // Key tuples grow one column per pass, each pass conditioned on the
    // values fixed so far. A null entry means the column yielded nothing
    // for that prefix.
    EncodingResult er = env.encode(doc, plan.slots);
    std::vector<std::vector<std::optional<KeyValue>>> tuples;
    for (const auto& kv :
         detect_key_values(env, er, doc, keys[0], env.model.column_detect))
      tuples.push_back({kv});

    for (size_t level = 1; level < keys.size(); ++level) {
      std::vector<std::vector<std::optional<KeyValue>>> grown;
      for (const auto& tuple : tuples) {
        std::vector<ColumnSlot> slots = plan.slots;
        for (size_t i = 0; i < level; ++i)
          if (tuple[i]) slots[keys[i]].value = tuple[i]->surface;
        EncodingResult lvl = env.encode(doc, slots);
        auto values =
            detect_key_values(env, lvl, doc, keys[level], env.model.span_detect);
        if (values.empty()) {
          auto extended = tuple;
          extended.push_back(std::nullopt);
          grown.push_back(std::move(extended));
        } else {
          for (const auto& kv : values) {
            auto extended = tuple;
            extended.push_back(kv);
            grown.push_back(std::move(extended));
          }
        }
      }
      tuples = std::move(grown);
    }

    for (const auto& tuple : tuples) {
      std::vector<ColumnSlot> slots = plan.slots;
      Row row;
      for (size_t i = 0; i < keys.size(); ++i) {
        if (!tuple[i]) continue;
        slots[keys[i]].value = tuple[i]->surface;
        row[plan.cols[keys[i]].name] =
            CellValue{tuple[i]->surface, tuple[i]->prov, std::nullopt};
      }
      extract_masked_cells(env, doc, plan, slots, true, row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

ExtractionResult finish(ScanEnv& env, uint64_t calls_before, ScanPlan plan,
                        std::vector<Row> rows) {
  ExtractionResult result;
  result.table.schema = std::move(plan.cols);
  result.table.rows = std::move(rows);
  result.stats = env.stats;
  result.stats.encoder_invocations = env.enc.invocations() - calls_before;
  return result;
}

ExtractionResult scan_member(ScanEnv& env, const TextCollection& coll,
                             const TextTableDef& def, const std::string& member,
                             const std::vector<std::string>& query_attrs) {
  ScanPlan plan = plan_scan(def, member, query_attrs);
  uint64_t before = env.enc.invocations();
  std::vector<Row> rows;
  if (plan.key_idx.empty())
    rows = basic_rows(env, coll, plan);
  else if (plan.key_idx.size() == 1)
    rows = multirow_rows(env, coll, plan);
  else
    rows = composite_rows(env, coll, plan);
  return finish(env, before, std::move(plan), std::move(rows));
}

}  // namespace

ExtractionResult scan_basic(const Encoder& enc, const Model& model,
                            const TextCollection& coll, const TextTableDef& def,
                            const std::vector<std::string>& query_attrs) {
  require_kind(def, TableKind::SingleRow, "scan_basic");
  ScanEnv env(enc, model);
  return scan_member(env, coll, def, def.name, query_attrs);
}

ExtractionResult scan_multirow(const Encoder& enc, const Model& model,
                               const TextCollection& coll, const TextTableDef& def,
                               const std::vector<std::string>& query_attrs) {
  require_kind(def, TableKind::MultiRow, "scan_multirow");
  ScanEnv env(enc, model);
  return scan_member(env, coll, def, def.name, query_attrs);
}

ExtractionResult scan_composite_key(const Encoder& enc, const Model& model,
                                    const TextCollection& coll,
                                    const TextTableDef& def,
                                    const std::vector<std::string>& query_attrs) {
  require_kind(def, TableKind::MultiRow, "scan_composite_key");
  if (def.identifying_attrs.size() < 2)
    throw PlanError("scan_composite_key requires at least two identifying "
                    "attributes, table '" +
                    def.name + "' has " +
                    std::to_string(def.identifying_attrs.size()));
  ScanEnv env(enc, model);
  return scan_member(env, coll, def, def.name, query_attrs);
}

ExtractionResult scan_multitable(const Encoder& enc, const Model& model,
                                 const TextCollection& coll, const TextTableDef& def,
                                 const std::string& table_name,
                                 const std::vector<std::string>& query_attrs) {
  require_kind(def, TableKind::MultiTable, "scan_multitable");
  auto members = member_tables(def);
  if (std::find(members.begin(), members.end(), table_name) == members.end())
    throw PlanError("definition '" + def.name + "' declares no member table '" +
                    table_name + "'");
  ScanEnv env(enc, model);
  return scan_member(env, coll, def, table_name, query_attrs);
}

ExtractionResult scan_table(const Encoder& enc, const Model& model,
                            const TextCollection& coll, const TextTableDef& def,
                            const std::vector<std::string>& query_attrs) {
  switch (def.kind) {
    case TableKind::SingleRow:
      return scan_basic(enc, model, coll, def, query_attrs);
    case TableKind::MultiRow:
      return scan_multirow(enc, model, coll, def, query_attrs);
    case TableKind::MultiTable:
      break;
  }
  // Every member is scanned and the results are concatenated with the
  // member name qualifying each output column.
  ExtractionResult combined;
  for (const auto& member : member_tables(def)) {
    std::vector<std::string> member_attrs;
    if (!query_attrs.empty()) {
      for (const auto& c : table_columns(def, member))
        for (const auto& a : query_attrs)
          if (c.name == a) member_attrs.push_back(a);
      if (member_attrs.empty()) continue;
    }
    ExtractionResult part =
        scan_multitable(enc, model, coll, def, member, member_attrs);
    for (auto col : part.table.schema) {
      col.name = member + "." + col.name;
      combined.table.schema.push_back(col);
    }
    for (const auto& row : part.table.rows) {
      Row qualified;
      for (const auto& [name, cell] : row) qualified[member + "." + name] = cell;
      combined.table.rows.push_back(std::move(qualified));
    }
    combined.stats.encoder_invocations += part.stats.encoder_invocations;
    combined.stats.spans_extracted += part.stats.spans_extracted;
    combined.stats.duplicates_merged += part.stats.duplicates_merged;
  }
  return combined;
}

ExtractionResult mm_join(const Encoder& enc, const Model& model,
                         const StructuredTable& table, const TextCollection& coll,
                         const LinkMap& link, const TextTableDef& def,
                         const std::vector<std::string>& query_attrs) {
  if (def.kind == TableKind::MultiTable)
    throw PlanError("mm_join does not support multi-table definitions");
  ScanPlan plan = plan_scan(def, def.name, query_attrs);

  for (const auto& c : plan.cols)
    for (const auto& tc : table.table.schema)
      if (c.name == tc.name)
        throw PlanError("join would extract column '" + c.name +
                        "' that table '" + table.name + "' already has");

  ScanEnv env(enc, model);
  uint64_t before = enc.invocations();
  std::vector<Row> rows;

  for (const auto& trow : table.table.rows) {
    std::vector<std::string> key;
    key.reserve(table.key_cols.size());
    for (const auto& kc : table.key_cols) {
      auto it = trow.find(kc);
      key.push_back(it == trow.end() ? std::string() : it->second.output_text());
    }
    const LinkMap::Entry* entry = link.find(key);

    if (entry == nullptr || entry->doc_ids.empty()) {
      rows.push_back(trow);
      continue;
    }
    for (const auto& doc_id : entry->doc_ids) {
      const Document* doc = coll.find(doc_id);
      if (doc == nullptr)
        throw InvalidArgument("link map '" + link.name +
                              "' names unknown document '" + doc_id + "'");
      // The row's cells travel along as provided slots, conditioning the
      // extraction on the join partner.
      std::vector<ColumnSlot> slots = plan.slots;
      for (const auto& tc : table.table.schema) {
        auto it = trow.find(tc.name);
        if (it == trow.end()) continue;
        ColumnSlot provided;
        provided.column = tc;
        provided.value = it->second.output_text();
        slots.push_back(provided);
      }
      Row row = trow;
      extract_masked_cells(env, *doc, plan, slots, false, row);
      rows.push_back(std::move(row));
    }
  }

  ExtractionResult result;
  result.table.schema = table.table.schema;
  for (const auto& c : plan.cols) result.table.schema.push_back(c);
  result.table.rows = std::move(rows);
  result.stats = env.stats;
  result.stats.encoder_invocations = enc.invocations() - before;
  return result;
}

ExtractionResult mm_union(const Encoder& enc, const Model& model,
                          const Table& table, const TextCollection& coll,
                          const TextTableDef& def, int n_examples, uint64_t seed) {
  if (def.kind == TableKind::MultiTable)
    throw PlanError("mm_union does not support multi-table definitions");
  if (n_examples < 0)
    throw InvalidArgument("n_examples must be nonnegative, got " +
                          std::to_string(n_examples));
  for (const auto& c : def.columns) {
    bool present = false;
    for (const auto& tc : table.schema) present |= tc.name == c.name;
    if (!present)
      throw PlanError("union table lacks column '" + c.name +
                      "' of definition '" + def.name + "'");
  }

  // The same sample must serve every document, so rows are drawn once up
  // front with a seeded shuffle.
  size_t take = std::min(static_cast<size_t>(n_examples), table.rows.size());
  std::vector<size_t> idx(table.rows.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::mt19937_64 rng(hash_mix(seed, fnv1a64("union")));
  for (size_t i = 0; i < take; ++i) {
    size_t j = i + rng() % (idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<Row> examples;
  examples.reserve(take);
  for (size_t i = 0; i < take; ++i) examples.push_back(table.rows[idx[i]]);

  ScanEnv env(enc, model);
  ExampleEncodingCache cache;
  env.examples = &examples;
  env.cache = &cache;
  ExtractionResult scanned = scan_member(env, coll, def, def.name, {});

  ExtractionResult result;
  result.table.schema = table.schema;
  result.table.rows = table.rows;
  for (auto& row : scanned.table.rows)
    result.table.rows.push_back(std::move(row));
  result.stats = scanned.stats;
  return result;
}

Table mm_aggregate(const Encoder& enc, const DuplicateHead& head,
                   const TextCollection& coll, const Table& extraction,
                   const std::string& group_col, AggregateKind agg) {
  bool declared = false;
  for (const auto& c : extraction.schema) declared |= c.name == group_col;
  if (!declared)
    throw PlanError("aggregation input has no column '" + group_col + "'");

  std::vector<const CellValue*> cells;
  for (const auto& row : extraction.rows) {
    auto it = row.find(group_col);
    if (it != row.end()) cells.push_back(&it->second);
  }

  bool have_provenance = true;
  for (const CellValue* c : cells) have_provenance &= c->provenance.has_value();

  std::vector<std::vector<size_t>> groups;
  if (have_provenance) {
    // Span representations are recomputed from provenance; each referenced
    // document is encoded once no matter how many cells it contributed.
    std::map<std::string, EncodingResult> encodings;
    std::vector<Vec> reps;
    reps.reserve(cells.size());
    for (const CellValue* c : cells) {
      const std::string& doc_id = c->provenance->doc_id;
      const Document* doc = coll.find(doc_id);
      if (doc == nullptr)
        throw InvalidArgument("aggregation cell names unknown document '" +
                              doc_id + "'");
      auto it = encodings.find(doc_id);
      if (it == encodings.end())
        it = encodings.emplace(doc_id, enc.encode(*doc, {})).first;
      auto [tb, te] = token_range_for(*doc, c->provenance->range);
      reps.push_back(span_representation(it->second, tb, te));
    }
    groups = cluster_duplicates(reps, head);
  } else {
    std::cerr << "warning: aggregation over '" << group_col
              << "' fell back to exact-string grouping because some cells "
                 "carry no provenance\n";
    std::map<std::string, size_t> first_seen;
    for (size_t i = 0; i < cells.size(); ++i) {
      std::string norm = normalize_value(cells[i]->output_text());
      auto it = first_seen.find(norm);
      if (it == first_seen.end()) {
        first_seen.emplace(norm, groups.size());
        groups.push_back({i});
      } else {
        groups[it->second].push_back(i);
      }
    }
  }

  Table out;
  out.schema = {
      ColumnDef{group_col, Dtype::Text, false, ""},
      ColumnDef{agg == AggregateKind::Count ? "count" : "count_distinct_docs",
                Dtype::Number, false, ""}};
  for (const auto& group : groups) {
    // The label is the group's most frequent surface; ties go to the
    // lexicographically smallest.
    std::map<std::string, size_t> freq;
    for (size_t i : group) ++freq[cells[i]->output_text()];
    std::string label;
    size_t best = 0;
    for (const auto& [surface, count] : freq) {
      if (count > best) {
        label = surface;
        best = count;
      }
    }

    CellValue label_cell{label, std::nullopt, std::nullopt};
    for (size_t i : group) {
      if (cells[i]->output_text() == label && cells[i]->provenance) {
        label_cell.provenance = cells[i]->provenance;
        break;
      }
    }

    size_t value = 0;
    if (agg == AggregateKind::Count) {
      value = group.size();
    } else {
      std::set<std::string> docs;
      for (size_t i : group)
        docs.insert(cells[i]->provenance ? cells[i]->provenance->doc_id
                                         : std::string());
      value = docs.size();
    }

    Row row;
    row[group_col] = label_cell;
    row[out.schema[1].name] =
        CellValue{std::to_string(value), std::nullopt, std::nullopt};
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace mmdb
