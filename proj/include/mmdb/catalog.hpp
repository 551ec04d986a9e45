#pragma once

#include <map>
#include <string>
#include <vector>

#include "mmdb/linkmap.hpp"
#include "mmdb/types.hpp"

namespace mmdb {

// A relational table loaded from JSONL rows, plus the columns that form its
// row key for linking against text collections.
struct StructuredTable {
  std::string name;
  Table table;
  std::vector<std::string> key_cols;
};

// In-memory registry of collections, table definitions, structured tables,
// and link maps. Registration validates; lookups throw NotFound. One name
// space is shared by text and structured tables.
class Catalog {
 public:
  void register_collection(TextCollection collection);
  void register_text_table(TextTableDef def);
  void register_structured_table(StructuredTable table);
  void register_link(LinkMap link);

  bool has_collection(const std::string& name) const;
  bool has_text_table(const std::string& name) const;
  bool has_structured_table(const std::string& name) const;
  bool has_link(const std::string& name) const;

  const TextCollection& collection(const std::string& name) const;
  const TextTableDef& text_table(const std::string& name) const;
  const StructuredTable& structured_table(const std::string& name) const;
  const LinkMap& link(const std::string& name) const;

  // The collection a text table reads from.
  const TextCollection& collection_of(const TextTableDef& def) const;

  std::vector<std::string> collection_names() const;
  std::vector<std::string> text_table_names() const;
  std::vector<std::string> structured_table_names() const;
  std::vector<std::string> link_names() const;

 private:
  std::map<std::string, TextCollection> collections_;
  std::map<std::string, TextTableDef> text_tables_;
  std::map<std::string, StructuredTable> structured_;
  std::map<std::string, LinkMap> links_;
};

// Reads structured rows ({"col": "value", ...} per line) against a declared
// schema. Numbers are accepted and stored as their decimal spelling.
Table structured_rows_from_jsonl(const std::string& content,
                                 const std::vector<ColumnDef>& schema,
                                 const std::string& origin = "<string>");

}  // namespace mmdb
