#include "mmdb/model_io.hpp"

#include "json.hpp"
#include "mmdb/error.hpp"
#include "mmdb/hash.hpp"
#include "mmdb/jsonl.hpp"

namespace mmdb {

using nlohmann::json;

namespace {

json matrix_to_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

Mat matrix_from_json(const json& j, int dim, const std::string& origin,
                     const std::string& field) {
  if (!j.is_array() || j.size() != static_cast<size_t>(dim) * dim)
    throw IoError(origin + ": field \"" + field + "\" must hold " +
                  std::to_string(dim * dim) + " numbers");
  Mat m(dim, dim);
  size_t k = 0;
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = j[k++].get<double>();
  return m;
}

json tagging_head_to_json(const TaggingHead& h) {
  json out;
  out["W_B"] = matrix_to_json(h.W_B);
  out["W_I"] = matrix_to_json(h.W_I);
  out["thresh_O"] = h.thresh_O;
  return out;
}

TaggingHead tagging_head_from_json(const json& j, int dim,
                                   const std::string& origin,
                                   const std::string& name) {
  if (!j.is_object() || !j.contains("W_B") || !j.contains("W_I") ||
      !j.contains("thresh_O"))
    throw IoError(origin + ": head \"" + name +
                  "\" needs fields W_B, W_I, thresh_O");
  TaggingHead h;
  h.W_B = matrix_from_json(j["W_B"], dim, origin, name + ".W_B");
  h.W_I = matrix_from_json(j["W_I"], dim, origin, name + ".W_I");
  h.thresh_O = j["thresh_O"].get<double>();
  return h;
}

}  // namespace

std::string model_to_json(const Model& model) {
  json j;
  j["version"] = 1;
  j["encoder"] = {{"kind", "reference"},
                  {"seed", model.encoder.seed},
                  {"dim", model.encoder.dim},
                  {"mix_weight", model.encoder.mix_weight}};
  j["heads"] = {{"span_detect", tagging_head_to_json(model.span_detect)},
                {"column_detect", tagging_head_to_json(model.column_detect)},
                {"duplicate_detect",
                 json{{"W_DD", matrix_to_json(model.duplicate_detect.W)},
                      {"thresh_DD", model.duplicate_detect.thresh}}}};
  return j.dump();
}

Model model_from_json(const std::string& content, const std::string& origin) {
  json j = json::parse(content, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw IoError(origin + ": invalid JSON model file");
  if (!j.contains("version") || !j["version"].is_number_integer())
    throw IoError(origin + ": missing model file version");
  int version = j["version"].get<int>();
  if (version != 1)
    throw IoError(origin + ": unsupported model file version " +
                  std::to_string(version));
  if (!j.contains("encoder") || !j["encoder"].is_object())
    throw IoError(origin + ": missing encoder configuration");
  const json& e = j["encoder"];
  Model m;
  if (e.value("kind", "reference") != std::string("reference"))
    throw IoError(origin + ": unsupported encoder kind \"" +
                  e.value("kind", "") + "\"");
  if (!e.contains("seed") || !e.contains("dim"))
    throw IoError(origin + ": encoder configuration needs seed and dim");
  m.encoder.seed = e["seed"].get<uint64_t>();
  m.encoder.dim = e["dim"].get<int>();
  m.encoder.mix_weight = e.value("mix_weight", 0.5);

  if (!j.contains("heads") || !j["heads"].is_object())
    throw IoError(origin + ": missing heads");
  const json& h = j["heads"];
  if (!h.contains("span_detect") || !h.contains("column_detect") ||
      !h.contains("duplicate_detect"))
    throw IoError(origin +
                  ": heads must include span_detect, column_detect, and "
                  "duplicate_detect");
  m.span_detect = tagging_head_from_json(h["span_detect"], m.encoder.dim,
                                         origin, "span_detect");
  m.column_detect = tagging_head_from_json(h["column_detect"], m.encoder.dim,
                                           origin, "column_detect");
  const json& dd = h["duplicate_detect"];
  if (!dd.is_object() || !dd.contains("W_DD") || !dd.contains("thresh_DD"))
    throw IoError(origin + ": duplicate_detect needs W_DD and thresh_DD");
  m.duplicate_detect.W =
      matrix_from_json(dd["W_DD"], m.encoder.dim, origin, "W_DD");
  m.duplicate_detect.thresh = dd["thresh_DD"].get<double>();
  return m;
}

void save_model(const Model& model, const std::string& path) {
  write_file(path, model_to_json(model) + "\n");
}

Model load_model(const std::string& path) {
  return model_from_json(read_file(path), path);
}

std::string model_hash(const Model& model) {
  return hash_hex(fnv1a64(model_to_json(model)));
}

}  // namespace mmdb
