#include "mmdb/jsonl.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mmdb/error.hpp"
#include "mmdb/hash.hpp"
#include "mmdb/tokenizer.hpp"

namespace mmdb {

using nlohmann::json;

namespace {

json parse_line(const std::string& line, const std::string& origin, size_t lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded())
    throw InvalidCorpus(origin + ":" + std::to_string(lineno) + ": invalid JSON");
  if (!j.is_object())
    throw InvalidCorpus(origin + ":" + std::to_string(lineno) +
                  ": expected a JSON object");
  return j;
}

std::string require_string(const json& j, const char* field,
                           const std::string& origin, size_t lineno) {
  if (!j.contains(field) || !j[field].is_string())
    throw InvalidCorpus(origin + ":" + std::to_string(lineno) +
                  ": missing string field \"" + field + "\"");
  return j[field].get<std::string>();
}

CharRange range_from_json(const json& j, const std::string& origin, size_t lineno) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() ||
      !j[1].is_number_unsigned())
    throw InvalidCorpus(origin + ":" + std::to_string(lineno) +
                  ": a span must be a [begin, end] pair of non-negative integers");
  CharRange r{j[0].get<size_t>(), j[1].get<size_t>()};
  if (r.end <= r.begin)
    throw InvalidCorpus(origin + ":" + std::to_string(lineno) +
                  ": span end must be greater than begin");
  return r;
}

// Splits into lines, keeping track of line numbers; blank lines are skipped.
template <typename Fn>
void for_each_line(const std::string& content, Fn fn) {
  size_t lineno = 0;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fn(line, lineno);
  }
}

}  // namespace

TextCollection collection_from_jsonl(const std::string& content,
                                     const std::string& name,
                                     const std::string& origin) {
  TextCollection out;
  out.name = name;
  std::set<std::string> ids;
  for_each_line(content, [&](const std::string& line, size_t lineno) {
    json j = parse_line(line, origin, lineno);
    Document d;
    d.id = require_string(j, "id", origin, lineno);
    d.text = require_string(j, "text", origin, lineno);
    if (!ids.insert(d.id).second)
      throw InvalidCorpus(origin + ":" + std::to_string(lineno) +
                    ": duplicate document id \"" + d.id + "\"");
    d.tokens = tokenize(d.text);
    out.documents.push_back(std::move(d));
  });
  return out;
}

TextCollection load_collection(const std::string& path, const std::string& name) {
  std::string n = name;
  if (n.empty()) n = std::filesystem::path(path).stem().string();
  return collection_from_jsonl(read_file(path), n, path);
}

std::string collection_to_jsonl(const TextCollection& collection) {
  std::string out;
  for (const auto& d : collection.documents) {
    json j;
    j["id"] = d.id;
    j["text"] = d.text;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void save_collection(const TextCollection& collection, const std::string& path) {
  write_file(path, collection_to_jsonl(collection));
}

std::vector<GoldAnnotation> gold_from_jsonl(const std::string& content,
                                            const std::string& origin) {
  std::vector<GoldAnnotation> out;
  std::set<std::string> ids;
  for_each_line(content, [&](const std::string& line, size_t lineno) {
    json j = parse_line(line, origin, lineno);
    GoldAnnotation g;
    g.doc_id = require_string(j, "doc_id", origin, lineno);
    if (!ids.insert(g.doc_id).second)
      throw InvalidCorpus(origin + ":" + std::to_string(lineno) +
                    ": duplicate document id \"" + g.doc_id + "\"");
    if (!j.contains("tables") || !j["tables"].is_object())
      throw InvalidCorpus(origin + ":" + std::to_string(lineno) +
                    ": missing object field \"tables\"");
    for (const auto& [table, rows] : j["tables"].items()) {
      if (!rows.is_array())
        throw InvalidCorpus(origin + ":" + std::to_string(lineno) + ": table \"" +
                      table + "\" must hold an array of rows");
      for (const auto& row : rows) {
        if (!row.is_object())
          throw InvalidCorpus(origin + ":" + std::to_string(lineno) +
                        ": rows must be JSON objects");
        GoldRow gr;
        for (const auto& [col, val] : row.items()) {
          if (val.is_null()) continue;
          if (!val.is_string())
            throw InvalidCorpus(origin + ":" + std::to_string(lineno) +
                          ": cell values must be strings or null");
          gr.cells[col] = val.get<std::string>();
        }
        g.tables[table].push_back(std::move(gr));
      }
    }
    if (j.contains("spans")) {
      if (!j["spans"].is_object())
        throw InvalidCorpus(origin + ":" + std::to_string(lineno) +
                      ": \"spans\" must map columns to range lists");
      for (const auto& [col, ranges] : j["spans"].items()) {
        for (const auto& r : ranges)
          g.spans[col].push_back(range_from_json(r, origin, lineno));
      }
    }
    if (j.contains("dup_groups")) {
      for (const auto& group : j["dup_groups"]) {
        std::vector<CharRange> members;
        for (const auto& r : group)
          members.push_back(range_from_json(r, origin, lineno));
        if (members.size() < 2)
          throw InvalidCorpus(origin + ":" + std::to_string(lineno) +
                        ": duplicate groups need at least two members");
        g.dup_groups.push_back(std::move(members));
      }
    }
    out.push_back(std::move(g));
  });
  return out;
}

std::vector<GoldAnnotation> load_gold(const std::string& path) {
  return gold_from_jsonl(read_file(path), path);
}

std::string gold_to_jsonl(const std::vector<GoldAnnotation>& gold) {
  std::string out;
  for (const auto& g : gold) {
    json j;
    j["doc_id"] = g.doc_id;
    j["tables"] = json::object();
    for (const auto& [table, rows] : g.tables) {
      json jrows = json::array();
      for (const auto& r : rows) {
        json jr = json::object();
        for (const auto& [col, val] : r.cells) jr[col] = val;
        jrows.push_back(jr);
      }
      j["tables"][table] = jrows;
    }
    if (!g.spans.empty()) {
      j["spans"] = json::object();
      for (const auto& [col, ranges] : g.spans) {
        json jr = json::array();
        for (const auto& r : ranges) jr.push_back({r.begin, r.end});
        j["spans"][col] = jr;
      }
    }
    if (!g.dup_groups.empty()) {
      json groups = json::array();
      for (const auto& group : g.dup_groups) {
        json jg = json::array();
        for (const auto& r : group) jg.push_back({r.begin, r.end});
        groups.push_back(jg);
      }
      j["dup_groups"] = groups;
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

void save_gold(const std::vector<GoldAnnotation>& gold, const std::string& path) {
  write_file(path, gold_to_jsonl(gold));
}

std::string def_to_json(const TextTableDef& def) {
  json j;
  j["name"] = def.name;
  j["collection"] = def.collection;
  j["kind"] = kind_name(def.kind);
  j["columns"] = json::array();
  for (const auto& c : def.columns) {
    json jc;
    jc["name"] = c.name;
    jc["dtype"] = dtype_name(c.dtype);
    if (!c.table_name.empty()) jc["table"] = c.table_name;
    j["columns"].push_back(jc);
  }
  j["identifying"] = def.identifying_attrs;
  return j.dump(2) + "\n";
}

TextTableDef def_from_json(const std::string& content, const std::string& origin) {
  json j = json::parse(content, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw IoError(origin + ": definition is not a JSON object");
  auto field = [&](const char* name) -> std::string {
    if (!j.contains(name) || !j[name].is_string())
      throw IoError(origin + ": missing string field \"" + name + "\"");
    return j[name].get<std::string>();
  };
  TextTableDef def;
  def.name = field("name");
  def.collection = field("collection");
  def.kind = kind_from_name(field("kind"));
  if (!j.contains("columns") || !j["columns"].is_array())
    throw IoError(origin + ": missing array field \"columns\"");
  for (const auto& jc : j["columns"]) {
    if (!jc.is_object() || !jc.contains("name") || !jc["name"].is_string())
      throw IoError(origin + ": every column needs a string \"name\"");
    ColumnDef c;
    c.name = jc["name"].get<std::string>();
    c.dtype = jc.contains("dtype") ? dtype_from_name(jc["dtype"].get<std::string>())
                                   : Dtype::Text;
    if (jc.contains("table")) c.table_name = jc["table"].get<std::string>();
    def.columns.push_back(std::move(c));
  }
  if (j.contains("identifying")) {
    for (const auto& k : j["identifying"])
      def.identifying_attrs.push_back(k.get<std::string>());
  }
  for (auto& c : def.columns)
    c.identifying = std::find(def.identifying_attrs.begin(),
                              def.identifying_attrs.end(),
                              c.name) != def.identifying_attrs.end();
  validate_def(def);
  return def;
}

void save_def(const TextTableDef& def, const std::string& path) {
  write_file(path, def_to_json(def));
}

TextTableDef load_def(const std::string& path) {
  return def_from_json(read_file(path), path);
}

std::string collection_content_hash(const TextCollection& collection) {
  uint64_t h = fnv1a64("collection");
  for (const auto& d : collection.documents) {
    h = fnv1a64(d.id, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(d.text, h);
    h = fnv1a64("\x1e", h);
  }
  return hash_hex(h);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace mmdb
