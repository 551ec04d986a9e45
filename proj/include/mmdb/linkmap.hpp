#pragma once

#include <string>
#include <vector>

#include "mmdb/types.hpp"

namespace mmdb {

// Connects structured rows to the documents that describe them. One entry
// per row key; JSONL format {"row_key": ["..."], "doc_ids": ["..."]}.
// Keys are compared after whitespace and case normalization.
struct LinkMap {
  struct Entry {
    std::vector<std::string> row_key;
    std::vector<std::string> doc_ids;
  };

  std::string name;
  std::vector<Entry> entries;

  // Returns nullptr when the key is unlinked.
  const Entry* find(const std::vector<std::string>& key) const;
};

LinkMap linkmap_from_jsonl(const std::string& content, const std::string& name,
                           const std::string& origin = "<string>");
LinkMap load_linkmap(const std::string& path, const std::string& name = "");
std::string linkmap_to_jsonl(const LinkMap& link);
void save_linkmap(const LinkMap& link, const std::string& path);

// Checks that every doc id exists in the collection and every row key
// matches a row of the table on the given key columns. Throws
// InvalidArgument naming the first offender.
void validate_link(const LinkMap& link, const Table& table,
                   const std::vector<std::string>& key_cols,
                   const TextCollection& collection);

}  // namespace mmdb
