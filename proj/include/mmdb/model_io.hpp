#pragma once

#include <string>

#include "mmdb/heads.hpp"

namespace mmdb {

// Versioned single-file model serialization. Matrices are stored row-major;
// doubles round-trip exactly, so save followed by load reproduces the model
// bit for bit. Unknown versions are rejected.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& content,
                      const std::string& origin = "<string>");
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

// Hash of the canonical serialization; identifies the model in persisted
// indexes and views for staleness checks.
std::string model_hash(const Model& model);

}  // namespace mmdb
