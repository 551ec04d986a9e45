#include "mmdb/types.hpp"

#include <set>

#include "mmdb/error.hpp"

namespace mmdb {

const char* dtype_name(Dtype t) {
  switch (t) {
    case Dtype::Text:
      return "text";
    case Dtype::Number:
      return "number";
    case Dtype::Date:
      return "date";
  }
  return "text";
}

Dtype dtype_from_name(const std::string& name) {
  if (name == "text") return Dtype::Text;
  if (name == "number") return Dtype::Number;
  if (name == "date") return Dtype::Date;
  throw InvalidArgument("unknown dtype '" + name + "'");
}

const char* kind_name(TableKind k) {
  switch (k) {
    case TableKind::SingleRow:
      return "single_row";
    case TableKind::MultiRow:
      return "multi_row";
    case TableKind::MultiTable:
      return "multi_table";
  }
  return "single_row";
}

TableKind kind_from_name(const std::string& name) {
  if (name == "single_row") return TableKind::SingleRow;
  if (name == "multi_row") return TableKind::MultiRow;
  if (name == "multi_table") return TableKind::MultiTable;
  throw InvalidArgument("unknown table kind '" + name + "'");
}

void validate_def(const TextTableDef& def) {
  if (def.name.empty()) throw InvalidDef("table definition needs a name");
  if (def.collection.empty())
    throw InvalidDef("table '" + def.name + "' names no collection");
  if (def.columns.empty())
    throw InvalidDef("table '" + def.name + "' declares no columns");

  std::set<std::string> seen;
  for (const auto& c : def.columns) {
    if (c.name.empty())
      throw InvalidDef("table '" + def.name + "' has a column without a name");
    std::string key = c.table_name.empty() ? c.name : c.table_name + "." + c.name;
    if (!seen.insert(key).second)
      throw InvalidDef("table '" + def.name + "' declares column '" + key +
                       "' twice");
    if (def.kind == TableKind::MultiTable && c.table_name.empty())
      throw InvalidDef("table '" + def.name + "' is multi_table but column '" +
                       c.name + "' names no member table");
    if (def.kind != TableKind::MultiTable && !c.table_name.empty())
      throw InvalidDef("table '" + def.name + "' is " + kind_name(def.kind) +
                       " but column '" + c.name + "' is qualified with '" +
                       c.table_name + "'");
  }

  for (const auto& k : def.identifying_attrs) {
    if (!def.find_column(k))
      throw InvalidDef("table '" + def.name + "' lists identifying attribute '" +
                       k + "' that is not a declared column");
  }

  // The identifying flags on columns and the identifying_attrs list must
  // agree; operators consult both.
  for (const auto& c : def.columns) {
    bool listed = def.is_identifying(c.name);
    if (c.identifying != listed)
      throw InvalidDef("table '" + def.name + "': column '" + c.name +
                       "' identifying flag disagrees with identifying_attrs");
  }

  switch (def.kind) {
    case TableKind::SingleRow:
      if (!def.identifying_attrs.empty())
        throw InvalidDef("table '" + def.name +
                         "' is single_row and must not declare identifying "
                         "attributes");
      break;
    case TableKind::MultiRow:
    case TableKind::MultiTable:
      if (def.identifying_attrs.empty())
        throw InvalidDef("table '" + def.name + "' is " + kind_name(def.kind) +
                         " and needs at least one identifying attribute");
      break;
  }
}

std::vector<std::string> member_tables(const TextTableDef& def) {
  if (def.kind != TableKind::MultiTable) return {def.name};
  std::vector<std::string> out;
  for (const auto& c : def.columns) {
    bool seen = false;
    for (const auto& t : out) seen |= t == c.table_name;
    if (!seen) out.push_back(c.table_name);
  }
  return out;
}

std::vector<ColumnDef> table_columns(const TextTableDef& def,
                                     const std::string& member) {
  std::vector<ColumnDef> out;
  for (const auto& c : def.columns) {
    if (def.kind != TableKind::MultiTable || c.table_name == member)
      out.push_back(c);
  }
  return out;
}

std::string span_key(const TextTableDef& def, const ColumnDef& col) {
  if (def.kind == TableKind::MultiTable) return col.table_name + "." + col.name;
  return col.name;
}

}  // namespace mmdb
