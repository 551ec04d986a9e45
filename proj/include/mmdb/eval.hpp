#pragma once

#include <map>
#include <string>
#include <vector>

#include "mmdb/types.hpp"

namespace mmdb {

// Extraction quality metric. For each document the predicted and gold rows
// are flattened into multisets of (identifying-key tuple, column, value)
// cells, values compared after case folding and whitespace normalization.
// Null cells contribute nothing. A document with empty prediction and empty
// gold scores 1.0; empty on one side only scores 0.0.

struct DocEval {
  std::string doc_id;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t predicted_cells = 0;
  size_t gold_cells = 0;
  size_t matched = 0;
};

struct ColumnEval {
  std::string column;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t predicted_cells = 0;
  size_t gold_cells = 0;
  size_t matched = 0;
};

struct EvalReport {
  std::vector<DocEval> per_doc;      // document order of the predicted map
  double mean_f1 = 0.0;              // arithmetic mean of per-doc F1
  double precision = 0.0;            // micro, cells pooled over documents
  double recall = 0.0;
  std::vector<ColumnEval> per_column;
};

// Compares per-document row sets. The maps must cover the same document ids;
// `key_cols` names the identifying columns whose values form the row key of
// every cell. Throws InvalidArgument on mismatched ids.
EvalReport mean_f1(const std::map<std::string, std::vector<Row>>& predicted,
                   const std::map<std::string, std::vector<GoldRow>>& gold,
                   const std::vector<std::string>& key_cols);

std::string report_to_json(const EvalReport& report);

// Aligned fixed-width table for terminal output.
std::string report_to_text(const EvalReport& report);

}  // namespace mmdb
