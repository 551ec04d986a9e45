#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmdb/catalog.hpp"
#include "mmdb/encoder.hpp"
#include "mmdb/heads.hpp"
#include "mmdb/linkmap.hpp"
#include "mmdb/types.hpp"

namespace mmdb {

// Instrumentation shared by every operator. Encoder invocations are taken
// from the encoder's own counter, so the number reported is the number of
// encode calls that actually ran.
struct ExtractionStats {
  uint64_t encoder_invocations = 0;
  uint64_t spans_extracted = 0;
  uint64_t duplicates_merged = 0;
};

struct ExtractionResult {
  Table table;
  ExtractionStats stats;
};

// Every cell a scan emits is an exact substring of the source document and
// carries provenance naming the document and character range. `query_attrs`
// selects the output columns (empty means every column); identifying
// columns are always included. Unknown attributes or a definition of the
// wrong kind raise PlanError.

// One row per document. Each queried column is tagged once per document;
// when several spans are found the first in document order wins.
ExtractionResult scan_basic(const Encoder& enc, const Model& model,
                            const TextCollection& coll, const TextTableDef& def,
                            const std::vector<std::string>& query_attrs = {});

// Iterative scan for multi-row tables. A first pass locates every value of
// the identifying column and merges duplicates; a second pass re-encodes
// the document once per key value, with the key slot carrying that value,
// and tags the dependent columns. Definitions with a composite key are
// routed through scan_composite_key.
ExtractionResult scan_multirow(const Encoder& enc, const Model& model,
                               const TextCollection& coll, const TextTableDef& def,
                               const std::vector<std::string>& query_attrs = {});

// Multi-row scan for composite keys: key columns are extracted one at a
// time, each pass conditioned on the values already fixed, and the
// resulting key tuples are completed independently. A key column that
// yields nothing for some prefix leaves a null cell in that tuple.
ExtractionResult scan_composite_key(const Encoder& enc, const Model& model,
                                    const TextCollection& coll,
                                    const TextTableDef& def,
                                    const std::vector<std::string>& query_attrs = {});

// Scan of one member table of a multi-table definition. Identifying slots
// are encoded with the member name prepended so that keys of different
// members stay distinguishable.
ExtractionResult scan_multitable(const Encoder& enc, const Model& model,
                                 const TextCollection& coll, const TextTableDef& def,
                                 const std::string& table_name,
                                 const std::vector<std::string>& query_attrs = {});

// Dispatches on def.kind: basic scan, multi-row scan, or one scan per
// member table with the member name prefixed to its output columns.
ExtractionResult scan_table(const Encoder& enc, const Model& model,
                            const TextCollection& coll, const TextTableDef& def,
                            const std::vector<std::string>& query_attrs = {});

// Left join of a structured table with a text collection. Only linked
// documents are encoded, once per linked (row, document) pair; each pair
// emits the row extended with cells extracted under the row's values
// provided as context. Unlinked rows pass through with null extensions.
ExtractionResult mm_join(const Encoder& enc, const Model& model,
                         const StructuredTable& table, const TextCollection& coll,
                         const LinkMap& link, const TextTableDef& def,
                         const std::vector<std::string>& query_attrs = {});

// Union of a table with rows extracted from text. `n_examples` rows are
// sampled from the table with the seed and their cell encodings enrich
// every masked slot; the same samples serve every document. With zero
// examples the extraction equals the plain scan exactly. Extracted rows are
// appended to the input rows.
ExtractionResult mm_union(const Encoder& enc, const Model& model,
                          const Table& table, const TextCollection& coll,
                          const TextTableDef& def, int n_examples, uint64_t seed);

enum class AggregateKind { Count, CountDistinctDocs };

// Groups an extracted column by representation: span representations are
// recomputed from provenance (each referenced document is encoded once) and
// clustered with the duplicate head, so surface variants of one entity land
// in one group. The group label is the most frequent member surface, ties
// broken by lexicographic order. When any cell lacks provenance the whole
// aggregation falls back to exact-string grouping and prints a warning to
// stderr. Null cells are skipped.
Table mm_aggregate(const Encoder& enc, const DuplicateHead& head,
                   const TextCollection& coll, const Table& extraction,
                   const std::string& group_col, AggregateKind agg);

}  // namespace mmdb
