#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mmdb {

// Half-open character range [begin, end) into a document's original text.
struct CharRange {
  size_t begin = 0;
  size_t end = 0;

  bool operator==(const CharRange& o) const {
    return begin == o.begin && end == o.end;
  }
  bool operator<(const CharRange& o) const {
    if (begin != o.begin) return begin < o.begin;
    return end < o.end;
  }
};

// One token of a document. `surface` is the case-folded slice of the text;
// the offsets always satisfy fold(text[begin:end]) == surface.
struct Token {
  std::string surface;
  size_t begin = 0;
  size_t end = 0;
};

struct Document {
  std::string id;
  std::string text;
  std::vector<Token> tokens;
};

// An ordered set of documents with unique ids, loaded from JSONL.
struct TextCollection {
  std::string name;
  std::vector<Document> documents;

  const Document* find(const std::string& doc_id) const {
    for (const auto& d : documents)
      if (d.id == doc_id) return &d;
    return nullptr;
  }
};

enum class Dtype { Text, Number, Date };

const char* dtype_name(Dtype t);
Dtype dtype_from_name(const std::string& name);

enum class TableKind { SingleRow, MultiRow, MultiTable };

const char* kind_name(TableKind k);
TableKind kind_from_name(const std::string& name);

struct ColumnDef {
  std::string name;
  Dtype dtype = Dtype::Text;
  bool identifying = false;
  // Only set for multi-table definitions, where one document feeds several
  // logical tables and each column belongs to exactly one of them.
  std::string table_name;

  bool operator==(const ColumnDef& o) const {
    return name == o.name && dtype == o.dtype && identifying == o.identifying &&
           table_name == o.table_name;
  }
};

// Declares how a text collection is read as a relational table.
struct TextTableDef {
  std::string name;
  std::string collection;
  TableKind kind = TableKind::SingleRow;
  std::vector<ColumnDef> columns;
  std::vector<std::string> identifying_attrs;

  const ColumnDef* find_column(const std::string& col) const {
    for (const auto& c : columns)
      if (c.name == col) return &c;
    return nullptr;
  }
  bool is_identifying(const std::string& col) const {
    for (const auto& k : identifying_attrs)
      if (k == col) return true;
    return false;
  }
};

// Validates the structural invariants of a definition and throws InvalidDef
// with the first violation found.
void validate_def(const TextTableDef& def);

// The logical tables a definition produces: the definition's own name for
// single-row and multi-row tables, and the distinct member table names in
// declaration order for multi-table definitions.
std::vector<std::string> member_tables(const TextTableDef& def);

// Columns of one member table (all columns unless multi-table).
std::vector<ColumnDef> table_columns(const TextTableDef& def,
                                     const std::string& member);

// Key used for a column in annotation span maps: "column" for single-table
// definitions and "table.column" for multi-table ones.
std::string span_key(const TextTableDef& def, const ColumnDef& col);

struct Provenance {
  std::string doc_id;
  CharRange range;

  bool operator==(const Provenance& o) const {
    return doc_id == o.doc_id && range == o.range;
  }
};

// A table cell. For extracted cells `surface` is the exact substring of the
// source document named by `provenance`; `normalized` is only set after
// duplicate-based normalization and wins for display and comparison.
struct CellValue {
  std::string surface;
  std::optional<Provenance> provenance;
  std::optional<std::string> normalized;

  const std::string& output_text() const {
    return normalized ? *normalized : surface;
  }
};

// Maps column name to cell. Absent key means the cell is null.
using Row = std::map<std::string, CellValue>;

struct Table {
  std::vector<ColumnDef> schema;
  std::vector<Row> rows;

  const CellValue* cell(size_t row, const std::string& col) const {
    const auto& r = rows[row];
    auto it = r.find(col);
    return it == r.end() ? nullptr : &it->second;
  }
};

// Ground truth for one document: expected rows per logical table, the
// character ranges where column values occur, and groups of ranges that
// refer to the same entity. For multi-table corpora, span keys are
// "table.column"; otherwise they are plain column names.
struct GoldRow {
  std::map<std::string, std::string> cells;
};

struct GoldAnnotation {
  std::string doc_id;
  std::map<std::string, std::vector<GoldRow>> tables;
  std::map<std::string, std::vector<CharRange>> spans;
  std::vector<std::vector<CharRange>> dup_groups;
};

}  // namespace mmdb
