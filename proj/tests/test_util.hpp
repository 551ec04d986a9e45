#pragma once

#include <random>
#include <string>

#include "mmdb/encoder.hpp"
#include "mmdb/tokenizer.hpp"
#include "mmdb/types.hpp"

namespace mmdb_test {

inline mmdb::Document make_doc(const std::string& id, const std::string& text) {
  mmdb::Document d;
  d.id = id;
  d.text = text;
  d.tokens = mmdb::tokenize(text);
  return d;
}

inline mmdb::Vec random_vec(std::mt19937_64& rng, int dim) {
  mmdb::Vec v(dim);
  for (int i = 0; i < dim; ++i) {
    double u = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
    v[i] = 2.0 * u - 1.0;
  }
  return v;
}

inline mmdb::Vec random_unit(std::mt19937_64& rng, int dim) {
  mmdb::Vec v = random_vec(rng, dim);
  double n = v.norm();
  if (n == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / n;
}

inline mmdb::Mat random_mat(std::mt19937_64& rng, int dim, double scale = 1.0) {
  mmdb::Mat m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      double u = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
      m(r, c) = scale * (2.0 * u - 1.0);
    }
  return m;
}

}  // namespace mmdb_test
