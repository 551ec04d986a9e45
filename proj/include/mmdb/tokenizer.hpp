#pragma once

#include <string>
#include <vector>

#include "mmdb/types.hpp"

namespace mmdb {

// ASCII lowercasing; bytes outside A-Z pass through unchanged.
std::string case_fold(const std::string& s);

// Splits on whitespace and punctuation. Runs of letters and digits form one
// token, every punctuation character is its own token, whitespace is
// dropped. Surfaces are case-folded; offsets index the original text.
std::vector<Token> tokenize(const std::string& text);

// Case-folds, trims leading and trailing whitespace, and collapses interior
// whitespace runs to one space. Used for evaluation and value comparison.
std::string normalize_value(const std::string& s);

// Maps a character range to the token range [first, last) that exactly
// covers it. Throws InvalidArgument when the range does not align with
// token boundaries.
std::pair<size_t, size_t> token_range_for(const Document& doc, CharRange range);

}  // namespace mmdb
