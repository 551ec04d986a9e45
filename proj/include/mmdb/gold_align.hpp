#pragma once

#include <vector>

#include "mmdb/heads.hpp"
#include "mmdb/types.hpp"

namespace mmdb {

// Shared glue between annotations and token sequences, used by training and
// by the planted-truth encoder.

// The character ranges under `key` that mention `value`: ranges whose text
// normalizes to the value, plus every range sharing a duplicate group with
// such a range (alias mentions of the same entity).
std::vector<CharRange> ranges_for_cell(const Document& doc,
                                       const GoldAnnotation& gold,
                                       const std::string& key,
                                       const std::string& value);

// IOB labels for the document's tokens with B at each range start and I
// inside. Ranges must align with token boundaries.
std::vector<IOBTag> tags_from_ranges(const Document& doc,
                                     const std::vector<CharRange>& ranges);

// Index of the duplicate group containing the range, or -1 when the range
// is in no group.
long dup_group_of(const GoldAnnotation& gold, CharRange range);

}  // namespace mmdb
