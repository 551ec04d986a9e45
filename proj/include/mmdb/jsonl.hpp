#pragma once

#include <string>
#include <vector>

#include "mmdb/types.hpp"

namespace mmdb {

// Line-oriented JSON readers and writers for the exchange formats:
//   documents   {"id": "...", "text": "..."}
//   annotations {"doc_id": "...", "tables": {...}, "spans": {...},
//                "dup_groups": [...]}
// Parse errors name the file and 1-based line number. Document order is
// preserved; duplicate document ids are rejected naming the id.

TextCollection collection_from_jsonl(const std::string& content,
                                     const std::string& name,
                                     const std::string& origin = "<string>");
TextCollection load_collection(const std::string& path,
                               const std::string& name = "");
std::string collection_to_jsonl(const TextCollection& collection);
void save_collection(const TextCollection& collection, const std::string& path);

std::vector<GoldAnnotation> gold_from_jsonl(const std::string& content,
                                            const std::string& origin = "<string>");
std::vector<GoldAnnotation> load_gold(const std::string& path);
std::string gold_to_jsonl(const std::vector<GoldAnnotation>& gold);
void save_gold(const std::vector<GoldAnnotation>& gold, const std::string& path);

// Content hash over ids and texts in document order; used for artifact
// staleness checks.
std::string collection_content_hash(const TextCollection& collection);

// Table definition as a single JSON object: {"name", "collection", "kind",
// "columns": [{"name", "dtype", "table"?}], "identifying": [names]}. The
// loaded definition is validated.
std::string def_to_json(const TextTableDef& def);
TextTableDef def_from_json(const std::string& content,
                           const std::string& origin = "<string>");
void save_def(const TextTableDef& def, const std::string& path);
TextTableDef load_def(const std::string& path);

// Whole-file helpers.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace mmdb
