#include "mmdb/tokenizer.hpp"

#include <cctype>

#include "mmdb/error.hpp"

namespace mmdb {

namespace {

bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

// Letters, digits, and any byte >= 0x80 (UTF-8 continuation or lead byte)
// count as word characters; everything else is punctuation.
bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

}  // namespace

std::string case_fold(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u >= 'A' && u <= 'Z') c = static_cast<char>(u - 'A' + 'a');
  }
  return out;
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_space_byte(c)) {
      ++i;
      continue;
    }
    size_t begin = i;
    if (is_word_byte(c)) {
      while (i < n && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    } else {
      ++i;  // one punctuation character per token
    }
    out.push_back(Token{case_fold(text.substr(begin, i - begin)), begin, i});
  }
  return out;
}

std::string normalize_value(const std::string& s) {
  std::string folded = case_fold(s);
  std::string out;
  out.reserve(folded.size());
  bool pending_space = false;
  for (unsigned char c : folded) {
    if (is_space_byte(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::pair<size_t, size_t> token_range_for(const Document& doc, CharRange range) {
  size_t first = doc.tokens.size();
  size_t last = doc.tokens.size();
  for (size_t t = 0; t < doc.tokens.size(); ++t) {
    if (doc.tokens[t].begin == range.begin) first = t;
    if (doc.tokens[t].end == range.end) last = t + 1;
  }
  if (first >= doc.tokens.size() || last > doc.tokens.size() || first >= last)
    throw InvalidArgument("character range [" + std::to_string(range.begin) +
                          ", " + std::to_string(range.end) +
                          ") of document '" + doc.id +
                          "' does not align with token boundaries");
  return {first, last};
}

}  // namespace mmdb
