#include "mmdb/catalog.hpp"

#include <sstream>

#include "json.hpp"
#include "mmdb/error.hpp"

namespace mmdb {

using nlohmann::json;

void Catalog::register_collection(TextCollection collection) {
  if (collection.name.empty())
    throw InvalidArgument("collections need a name");
  if (collections_.count(collection.name))
    throw InvalidArgument("collection '" + collection.name +
                          "' is already registered");
  collections_.emplace(collection.name, std::move(collection));
}

void Catalog::register_text_table(TextTableDef def) {
  validate_def(def);
  if (!collections_.count(def.collection))
    throw NotFound("collection '" + def.collection + "' is not registered");
  if (text_tables_.count(def.name) || structured_.count(def.name))
    throw InvalidArgument("table '" + def.name + "' is already registered");
  text_tables_.emplace(def.name, std::move(def));
}

void Catalog::register_structured_table(StructuredTable table) {
  if (table.name.empty()) throw InvalidArgument("tables need a name");
  if (text_tables_.count(table.name) || structured_.count(table.name))
    throw InvalidArgument("table '" + table.name + "' is already registered");
  for (const auto& key : table.key_cols) {
    bool found = false;
    for (const auto& c : table.table.schema) found |= c.name == key;
    if (!found)
      throw InvalidDef("table '" + table.name + "' lists key column '" + key +
                       "' that is not in its schema");
  }
  structured_.emplace(table.name, std::move(table));
}

void Catalog::register_link(LinkMap link) {
  if (link.name.empty()) throw InvalidArgument("link maps need a name");
  if (links_.count(link.name))
    throw InvalidArgument("link '" + link.name + "' is already registered");
  links_.emplace(link.name, std::move(link));
}

bool Catalog::has_collection(const std::string& name) const {
  return collections_.count(name) > 0;
}
bool Catalog::has_text_table(const std::string& name) const {
  return text_tables_.count(name) > 0;
}
bool Catalog::has_structured_table(const std::string& name) const {
  return structured_.count(name) > 0;
}
bool Catalog::has_link(const std::string& name) const {
  return links_.count(name) > 0;
}

const TextCollection& Catalog::collection(const std::string& name) const {
  auto it = collections_.find(name);
  if (it == collections_.end())
    throw NotFound("collection '" + name + "' is not registered");
  return it->second;
}

const TextTableDef& Catalog::text_table(const std::string& name) const {
  auto it = text_tables_.find(name);
  if (it == text_tables_.end())
    throw NotFound("text table '" + name + "' is not registered");
  return it->second;
}

const StructuredTable& Catalog::structured_table(const std::string& name) const {
  auto it = structured_.find(name);
  if (it == structured_.end())
    throw NotFound("table '" + name + "' is not registered");
  return it->second;
}

const LinkMap& Catalog::link(const std::string& name) const {
  auto it = links_.find(name);
  if (it == links_.end())
    throw NotFound("link '" + name + "' is not registered");
  return it->second;
}

const TextCollection& Catalog::collection_of(const TextTableDef& def) const {
  return collection(def.collection);
}

namespace {
template <typename M>
std::vector<std::string> keys_of(const M& m) {
  std::vector<std::string> out;
  out.reserve(m.size());
  for (const auto& [k, v] : m) out.push_back(k);
  return out;
}
}  // namespace

std::vector<std::string> Catalog::collection_names() const {
  return keys_of(collections_);
}
std::vector<std::string> Catalog::text_table_names() const {
  return keys_of(text_tables_);
}
std::vector<std::string> Catalog::structured_table_names() const {
  return keys_of(structured_);
}
std::vector<std::string> Catalog::link_names() const { return keys_of(links_); }

Table structured_rows_from_jsonl(const std::string& content,
                                 const std::vector<ColumnDef>& schema,
                                 const std::string& origin) {
  Table out;
  out.schema = schema;
  size_t lineno = 0;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw IoError(origin + ":" + std::to_string(lineno) + ": invalid JSON");
    Row row;
    for (const auto& c : schema) {
      if (!j.contains(c.name) || j[c.name].is_null()) continue;
      const auto& v = j[c.name];
      CellValue cell;
      if (v.is_string()) {
        cell.surface = v.get<std::string>();
      } else if (v.is_number_integer()) {
        cell.surface = std::to_string(v.get<long long>());
      } else if (v.is_number()) {
        cell.surface = std::to_string(v.get<double>());
      } else {
        throw IoError(origin + ":" + std::to_string(lineno) + ": column \"" +
                      c.name + "\" must hold a string or number");
      }
      row.emplace(c.name, std::move(cell));
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace mmdb
