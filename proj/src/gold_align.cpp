#include "mmdb/gold_align.hpp"

#include <algorithm>
#include <set>

#include "mmdb/tokenizer.hpp"

namespace mmdb {

long dup_group_of(const GoldAnnotation& gold, CharRange range) {
  for (size_t g = 0; g < gold.dup_groups.size(); ++g) {
    for (const auto& r : gold.dup_groups[g])
      if (r == range) return static_cast<long>(g);
  }
  return -1;
}

std::vector<CharRange> ranges_for_cell(const Document& doc,
                                       const GoldAnnotation& gold,
                                       const std::string& key,
                                       const std::string& value) {
  auto it = gold.spans.find(key);
  if (it == gold.spans.end()) return {};
  const auto& ranges = it->second;
  const std::string want = normalize_value(value);

  std::set<CharRange> out;
  std::set<long> groups;
  for (const auto& r : ranges) {
    std::string got = normalize_value(doc.text.substr(r.begin, r.end - r.begin));
    if (got == want) {
      out.insert(r);
      long g = dup_group_of(gold, r);
      if (g >= 0) groups.insert(g);
    }
  }
  // Alias mentions: group mates of a direct match that are spans of the same
  // column.
  for (const auto& r : ranges) {
    if (out.count(r)) continue;
    long g = dup_group_of(gold, r);
    if (g >= 0 && groups.count(g)) out.insert(r);
  }
  return std::vector<CharRange>(out.begin(), out.end());
}

std::vector<IOBTag> tags_from_ranges(const Document& doc,
                                     const std::vector<CharRange>& ranges) {
  std::vector<IOBTag> tags(doc.tokens.size(), IOBTag::O);
  for (const auto& r : ranges) {
    auto [first, last] = token_range_for(doc, r);
    tags[first] = IOBTag::B;
    for (size_t t = first + 1; t < last; ++t) tags[t] = IOBTag::I;
  }
  return tags;
}

}  // namespace mmdb
