#include "mmdb/linkmap.hpp"

#include <filesystem>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mmdb/error.hpp"
#include "mmdb/jsonl.hpp"
#include "mmdb/tokenizer.hpp"

namespace mmdb {

using nlohmann::json;

namespace {

std::vector<std::string> normalized_key(const std::vector<std::string>& key) {
  std::vector<std::string> out;
  out.reserve(key.size());
  for (const auto& k : key) out.push_back(normalize_value(k));
  return out;
}

}  // namespace

const LinkMap::Entry* LinkMap::find(const std::vector<std::string>& key) const {
  std::vector<std::string> want = normalized_key(key);
  for (const auto& e : entries) {
    if (normalized_key(e.row_key) == want) return &e;
  }
  return nullptr;
}

LinkMap linkmap_from_jsonl(const std::string& content, const std::string& name,
                           const std::string& origin) {
  LinkMap out;
  out.name = name;
  size_t lineno = 0;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw IoError(origin + ":" + std::to_string(lineno) + ": invalid JSON");
    if (!j.contains("row_key") || !j["row_key"].is_array() ||
        !j.contains("doc_ids") || !j["doc_ids"].is_array())
      throw IoError(origin + ":" + std::to_string(lineno) +
                    ": expected fields \"row_key\" and \"doc_ids\"");
    LinkMap::Entry e;
    for (const auto& k : j["row_key"]) {
      if (!k.is_string())
        throw IoError(origin + ":" + std::to_string(lineno) +
                      ": row keys must be strings");
      e.row_key.push_back(k.get<std::string>());
    }
    if (e.row_key.empty())
      throw IoError(origin + ":" + std::to_string(lineno) +
                    ": row key must not be empty");
    for (const auto& d : j["doc_ids"]) {
      if (!d.is_string())
        throw IoError(origin + ":" + std::to_string(lineno) +
                      ": doc ids must be strings");
      e.doc_ids.push_back(d.get<std::string>());
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

LinkMap load_linkmap(const std::string& path, const std::string& name) {
  std::string n = name;
  if (n.empty()) n = std::filesystem::path(path).stem().string();
  return linkmap_from_jsonl(read_file(path), n, path);
}

std::string linkmap_to_jsonl(const LinkMap& link) {
  std::string out;
  for (const auto& e : link.entries) {
    json j;
    j["row_key"] = e.row_key;
    j["doc_ids"] = e.doc_ids;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void save_linkmap(const LinkMap& link, const std::string& path) {
  write_file(path, linkmap_to_jsonl(link));
}

void validate_link(const LinkMap& link, const Table& table,
                   const std::vector<std::string>& key_cols,
                   const TextCollection& collection) {
  if (key_cols.empty())
    throw InvalidArgument("link '" + link.name +
                          "' cannot be validated without key columns");

  std::set<std::vector<std::string>> table_keys;
  for (const auto& row : table.rows) {
    std::vector<std::string> key;
    for (const auto& col : key_cols) {
      auto it = row.find(col);
      key.push_back(it == row.end() ? std::string()
                                    : normalize_value(it->second.output_text()));
    }
    table_keys.insert(std::move(key));
  }

  std::set<std::string> doc_ids;
  for (const auto& d : collection.documents) doc_ids.insert(d.id);

  for (const auto& e : link.entries) {
    if (e.row_key.size() != key_cols.size())
      throw InvalidArgument("link '" + link.name + "' entry has " +
                            std::to_string(e.row_key.size()) +
                            " key values but the table key has " +
                            std::to_string(key_cols.size()) + " columns");
    if (!table_keys.count(normalized_key(e.row_key))) {
      std::string shown;
      for (const auto& k : e.row_key) {
        if (!shown.empty()) shown += ", ";
        shown += k;
      }
      throw InvalidArgument("link '" + link.name + "' row key (" + shown +
                            ") matches no table row");
    }
    for (const auto& d : e.doc_ids) {
      if (!doc_ids.count(d))
        throw InvalidArgument("link '" + link.name + "' references document '" +
                              d + "' that is not in collection '" +
                              collection.name + "'");
    }
  }
}

}  // namespace mmdb
