#include "mmdb/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "mmdb/error.hpp"
#include "mmdb/tokenizer.hpp"

namespace mmdb {

using nlohmann::json;

namespace {

// A cell identity: normalized key tuple, column name, normalized value.
// Stored as one string with unit separators so it can key a multiset map.
using CellBag = std::map<std::string, size_t>;

std::string cell_id(const std::vector<std::string>& key_vals,
                    const std::string& column, const std::string& value) {
  std::string id;
  for (const auto& k : key_vals) {
    id += k;
    id += '\x1f';
  }
  id += '\x1e';
  id += column;
  id += '\x1f';
  id += value;
  return id;
}

std::string column_of_id(const std::string& id) {
  size_t rs = id.find('\x1e');
  size_t us = id.find('\x1f', rs);
  return id.substr(rs + 1, us - rs - 1);
}

CellBag cells_of_rows(const std::vector<Row>& rows,
                      const std::vector<std::string>& key_cols) {
  CellBag bag;
  for (const auto& row : rows) {
    std::vector<std::string> key_vals;
    key_vals.reserve(key_cols.size());
    for (const auto& k : key_cols) {
      auto it = row.find(k);
      key_vals.push_back(it == row.end() ? std::string()
                                         : normalize_value(it->second.output_text()));
    }
    for (const auto& [col, cell] : row)
      ++bag[cell_id(key_vals, col, normalize_value(cell.output_text()))];
  }
  return bag;
}

size_t bag_size(const CellBag& bag) {
  size_t n = 0;
  for (const auto& [_, c] : bag) n += c;
  return n;
}

size_t bag_overlap(const CellBag& a, const CellBag& b) {
  size_t n = 0;
  for (const auto& [id, c] : a) {
    auto it = b.find(id);
    if (it != b.end()) n += std::min(c, it->second);
  }
  return n;
}

void prf(size_t matched, size_t pred, size_t gold, double& p, double& r,
         double& f1) {
  if (pred == 0 && gold == 0) {
    p = r = f1 = 1.0;
    return;
  }
  p = pred == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(pred);
  r = gold == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(gold);
  f1 = (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace

EvalReport mean_f1(const std::map<std::string, std::vector<Row>>& predicted,
                   const std::map<std::string, std::vector<GoldRow>>& gold,
                   const std::vector<std::string>& key_cols) {
  for (const auto& [id, _] : predicted)
    if (!gold.count(id))
      throw InvalidArgument("predicted document '" + id + "' has no gold rows");
  for (const auto& [id, _] : gold)
    if (!predicted.count(id))
      throw InvalidArgument("gold document '" + id + "' has no predicted rows");

  EvalReport report;
  size_t total_pred = 0, total_gold = 0, total_matched = 0;
  std::map<std::string, ColumnEval> columns;
  double f1_sum = 0.0;

  for (const auto& [doc_id, pred_rows] : predicted) {
    CellBag pred_bag = cells_of_rows(pred_rows, key_cols);

    CellBag gold_bag;
    for (const auto& grow : gold.at(doc_id)) {
      std::vector<std::string> key_vals;
      for (const auto& k : key_cols) {
        auto it = grow.cells.find(k);
        key_vals.push_back(it == grow.cells.end() ? std::string()
                                                  : normalize_value(it->second));
      }
      for (const auto& [col, val] : grow.cells)
        ++gold_bag[cell_id(key_vals, col, normalize_value(val))];
    }

    DocEval de;
    de.doc_id = doc_id;
    de.predicted_cells = bag_size(pred_bag);
    de.gold_cells = bag_size(gold_bag);
    de.matched = bag_overlap(pred_bag, gold_bag);
    prf(de.matched, de.predicted_cells, de.gold_cells, de.precision, de.recall,
        de.f1);
    f1_sum += de.f1;
    total_pred += de.predicted_cells;
    total_gold += de.gold_cells;
    total_matched += de.matched;
    report.per_doc.push_back(de);

    for (const auto& [id, c] : pred_bag) {
      auto& ce = columns[column_of_id(id)];
      ce.predicted_cells += c;
      auto it = gold_bag.find(id);
      if (it != gold_bag.end()) ce.matched += std::min(c, it->second);
    }
    for (const auto& [id, c] : gold_bag) columns[column_of_id(id)].gold_cells += c;
  }

  report.mean_f1 =
      report.per_doc.empty() ? 1.0 : f1_sum / static_cast<double>(report.per_doc.size());
  double micro_f1;
  prf(total_matched, total_pred, total_gold, report.precision, report.recall,
      micro_f1);
  (void)micro_f1;

  for (auto& [name, ce] : columns) {
    ce.column = name;
    prf(ce.matched, ce.predicted_cells, ce.gold_cells, ce.precision, ce.recall,
        ce.f1);
    report.per_column.push_back(ce);
  }
  return report;
}

std::string report_to_json(const EvalReport& report) {
  json j;
  j["mean_f1"] = report.mean_f1;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["documents"] = json::array();
  for (const auto& d : report.per_doc) {
    j["documents"].push_back({{"doc_id", d.doc_id},
                              {"precision", d.precision},
                              {"recall", d.recall},
                              {"f1", d.f1},
                              {"predicted_cells", d.predicted_cells},
                              {"gold_cells", d.gold_cells},
                              {"matched", d.matched}});
  }
  j["columns"] = json::array();
  for (const auto& c : report.per_column) {
    j["columns"].push_back({{"column", c.column},
                            {"precision", c.precision},
                            {"recall", c.recall},
                            {"f1", c.f1},
                            {"predicted_cells", c.predicted_cells},
                            {"gold_cells", c.gold_cells},
                            {"matched", c.matched}});
  }
  return j.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "mean F1: " << report.mean_f1 << "  precision: " << report.precision
      << "  recall: " << report.recall << "  documents: " << report.per_doc.size()
      << "\n";
  if (!report.per_column.empty()) {
    size_t width = 6;
    for (const auto& c : report.per_column) width = std::max(width, c.column.size());
    out << std::left << std::setw(static_cast<int>(width) + 2) << "column"
        << std::right << std::setw(10) << "precision" << std::setw(10) << "recall"
        << std::setw(10) << "f1" << std::setw(10) << "matched" << std::setw(10)
        << "gold" << "\n";
    for (const auto& c : report.per_column) {
      out << std::left << std::setw(static_cast<int>(width) + 2) << c.column
          << std::right << std::setw(10) << c.precision << std::setw(10)
          << c.recall << std::setw(10) << c.f1 << std::setw(10) << c.matched
          << std::setw(10) << c.gold_cells << "\n";
    }
  }
  return out.str();
}

}  // namespace mmdb
