#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mmdb/encoder.hpp"
#include "mmdb/error.hpp"
#include "mmdb/heads.hpp"
#include "test_util.hpp"

using namespace mmdb;
using mmdb_test::make_doc;
using mmdb_test::random_mat;
using mmdb_test::random_unit;

namespace {

// Independent scoring by explicit summation, used as the oracle against the
// matrix-product implementation.
double bilinear_by_loops(const Vec& w, const Mat& W, const Vec& c) {
  double s = 0.0;
  for (int i = 0; i < w.size(); ++i)
    for (int j = 0; j < c.size(); ++j) s += w[i] * W(i, j) * c[j];
  return s;
}

// Independent tag rule: O unless a score strictly beats the threshold, and
// between the two span tags I needs a strict win over B.
IOBTag oracle_tag(const Vec& w, const Vec& c, const TaggingHead& h) {
  double sb = bilinear_by_loops(w, h.W_B, c);
  double si = bilinear_by_loops(w, h.W_I, c);
  if (sb <= h.thresh_O && si <= h.thresh_O) return IOBTag::O;
  return si > sb ? IOBTag::I : IOBTag::B;
}

// Independent span decoder: scans for the positions where a span must break
// instead of tracking an open span.
std::vector<std::pair<size_t, size_t>> oracle_decode(const std::vector<IOBTag>& tags) {
  std::vector<std::pair<size_t, size_t>> spans;
  size_t i = 0;
  while (i < tags.size()) {
    if (tags[i] == IOBTag::O) {
      ++i;
      continue;
    }
    // A span starts here (B, or I with no open span) and extends over the
    // following I tags.
    size_t j = i + 1;
    while (j < tags.size() && tags[j] == IOBTag::I) ++j;
    spans.emplace_back(i, j);
    i = j;
  }
  return spans;
}

TaggingHead head_2d(double b00, double b01, double b10, double b11,
                    double i00, double i01, double i10, double i11,
                    double thresh) {
  TaggingHead h;
  h.W_B = Mat(2, 2);
  h.W_B << b00, b01, b10, b11;
  h.W_I = Mat(2, 2);
  h.W_I << i00, i01, i10, i11;
  h.thresh_O = thresh;
  return h;
}

}  // namespace

TEST_CASE("iob_tag hand cases cover all three outcomes") {
  Vec w(2), c(2);
  w << 1.0, 0.0;
  c << 0.0, 1.0;
  // w' W_B c picks entry (0, 1) of W_B here.
  auto head = head_2d(0, 2, 0, 0, /*I*/ 0, 0, 0, 0, 1.0);
  CHECK(iob_tag(w, c, head) == IOBTag::B);

  head = head_2d(0, 0, 0, 0, /*I*/ 0, 2, 0, 0, 1.0);
  CHECK(iob_tag(w, c, head) == IOBTag::I);

  head = head_2d(0, 0.5, 0, 0, /*I*/ 0, 0.5, 0, 0, 1.0);
  CHECK(iob_tag(w, c, head) == IOBTag::O);
}

TEST_CASE("iob_tag resolves exact ties as O then B then I") {
  Vec w(2), c(2);
  w << 1.0, 0.0;
  c << 0.0, 1.0;
  // Both span scores equal and above threshold: B wins.
  auto head = head_2d(0, 2, 0, 0, 0, 2, 0, 0, 1.0);
  CHECK(iob_tag(w, c, head) == IOBTag::B);
  // Scores exactly at the threshold: O wins.
  head = head_2d(0, 2, 0, 0, 0, 2, 0, 0, 2.0);
  CHECK(iob_tag(w, c, head) == IOBTag::O);
  // I strictly above B and the threshold: I wins.
  head = head_2d(0, 2, 0, 0, 0, 3, 0, 0, 1.0);
  CHECK(iob_tag(w, c, head) == IOBTag::I);
}

TEST_CASE("iob_tag agrees with explicit summation on random triples") {
  std::mt19937_64 rng(123);
  const int dim = 8;
  for (int iter = 0; iter < 1000; ++iter) {
    TaggingHead h;
    h.W_B = random_mat(rng, dim);
    h.W_I = random_mat(rng, dim);
    h.thresh_O = random_unit(rng, 1)[0];
    Vec w = random_unit(rng, dim);
    Vec c = random_unit(rng, dim);
    CHECK(iob_tag(w, c, h) == oracle_tag(w, c, h));
  }
}

TEST_CASE("tag_sequence matches per token tagging") {
  ReferenceEncoder enc({3, 16, 0.5});
  auto doc = make_doc("d", "Bob Jones was diagnosed with fever");
  ColumnSlot slot;
  slot.column = ColumnDef{"diagnosis", Dtype::Text, false, ""};
  auto r = enc.encode(doc, {slot});

  std::mt19937_64 rng(9);
  TaggingHead h;
  h.W_B = random_mat(rng, 16);
  h.W_I = random_mat(rng, 16);
  h.thresh_O = 0.1;
  auto tags = tag_sequence(r, 0, h);
  REQUIRE(tags.size() == r.token_reps.size());
  for (size_t i = 0; i < tags.size(); ++i)
    CHECK(tags[i] == iob_tag(r.token_reps[i], r.cell_reps[0], h));

  CHECK_THROWS_AS(tag_sequence(r, 1, h), InvalidArgument);
}

TEST_CASE("decode_spans handles the documented tag patterns") {
  auto doc = make_doc("d", "a b c d e");
  using T = IOBTag;

  auto spans = decode_spans({T::O, T::B, T::I, T::O, T::B}, doc);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].tok_begin == 1);
  CHECK(spans[0].tok_end == 3);
  CHECK(spans[0].surface == "b c");
  CHECK(spans[0].range == CharRange{2, 5});
  CHECK(spans[1].tok_begin == 4);
  CHECK(spans[1].tok_end == 5);
  CHECK(spans[1].surface == "e");

  SUBCASE("orphan I opens a span") {
    auto s = decode_spans({T::I, T::I, T::O, T::O, T::O}, doc);
    REQUIRE(s.size() == 1);
    CHECK(s[0].tok_begin == 0);
    CHECK(s[0].tok_end == 2);
  }
  SUBCASE("adjacent B tags split spans") {
    auto s = decode_spans({T::B, T::B, T::O, T::O, T::O}, doc);
    REQUIRE(s.size() == 2);
    CHECK(s[0].tok_end == 1);
    CHECK(s[1].tok_begin == 1);
  }
  SUBCASE("a span may run to the end of the document") {
    auto s = decode_spans({T::O, T::O, T::O, T::B, T::I}, doc);
    REQUIRE(s.size() == 1);
    CHECK(s[0].tok_end == 5);
    CHECK(s[0].surface == "d e");
  }
  SUBCASE("all O yields nothing") {
    CHECK(decode_spans({T::O, T::O, T::O, T::O, T::O}, doc).empty());
  }
  SUBCASE("tag count must match token count") {
    CHECK_THROWS_AS(decode_spans({T::O, T::B}, doc), InvalidArgument);
  }
}

TEST_CASE("decode_spans agrees with an independent decoder on random tags") {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 500; ++iter) {
    size_t n = 1 + rng() % 12;
    std::string text;
    for (size_t i = 0; i < n; ++i) {
      if (i) text += ' ';
      text += static_cast<char>('a' + (i % 26));
    }
    auto doc = make_doc("d", text);
    std::vector<IOBTag> tags(n);
    for (auto& t : tags) {
      switch (rng() % 3) {
        case 0: t = IOBTag::B; break;
        case 1: t = IOBTag::I; break;
        default: t = IOBTag::O; break;
      }
    }
    auto got = decode_spans(tags, doc);
    auto want = oracle_decode(tags);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].tok_begin == want[i].first);
      CHECK(got[i].tok_end == want[i].second);
      CHECK(got[i].range.begin == doc.tokens[want[i].first].begin);
      CHECK(got[i].range.end == doc.tokens[want[i].second - 1].end);
    }
  }
}

TEST_CASE("span_representation is the normalized token mean") {
  ReferenceEncoder enc({3, 16, 0.5});
  auto r = enc.encode(make_doc("d", "aa bb cc"), {});

  Vec single = span_representation(r, 1, 2);
  CHECK((single - r.token_reps[1]).norm() < 1e-15);

  Vec pair = span_representation(r, 0, 2);
  Vec expect = l2_normalize(Vec(0.5 * (r.token_reps[0] + r.token_reps[1])));
  CHECK((pair - expect).norm() < 1e-12);
  CHECK(std::abs(pair.norm() - 1.0) < 1e-12);

  CHECK_THROWS_AS(span_representation(r, 2, 2), InvalidArgument);
  CHECK_THROWS_AS(span_representation(r, 1, 4), InvalidArgument);
}

TEST_CASE("duplicate_score is symmetric and thresholded strictly") {
  std::mt19937_64 rng(5);
  const int dim = 8;
  DuplicateHead h;
  h.W = random_mat(rng, dim);
  h.thresh = 0.2;
  for (int iter = 0; iter < 200; ++iter) {
    Vec a = random_unit(rng, dim);
    Vec b = random_unit(rng, dim);
    CHECK(duplicate_score(a, b, h) == doctest::Approx(duplicate_score(b, a, h)).epsilon(1e-12));
    CHECK(is_duplicate(a, b, h) == is_duplicate(b, a, h));
  }

  // With W = 2I the score of unit vectors is twice their cosine.
  DuplicateHead id;
  id.W = 2.0 * Mat::Identity(dim, dim);
  id.thresh = 1.0;
  Vec e1 = Vec::Zero(dim);
  e1[0] = 1.0;
  CHECK(duplicate_score(e1, e1, id) == doctest::Approx(2.0));
  CHECK(is_duplicate(e1, e1, id));

  // A score exactly at the threshold is not a duplicate.
  id.W = Mat::Identity(dim, dim);
  CHECK(duplicate_score(e1, e1, id) == 1.0);
  CHECK_FALSE(is_duplicate(e1, e1, id));
}

TEST_CASE("duplicate decisions only see the symmetric part of W") {
  const int dim = 4;
  Mat skew = Mat::Zero(dim, dim);
  skew(0, 1) = 3.0;
  skew(1, 0) = -3.0;
  DuplicateHead h{skew, -0.5};
  Vec a = Vec::Zero(dim), b = Vec::Zero(dim);
  a[0] = 1.0;
  b[1] = 1.0;
  // The antisymmetric contributions cancel exactly.
  CHECK(duplicate_score(a, b, h) == 0.0);
}

TEST_CASE("cluster_duplicates matches a transitive closure oracle") {
  std::mt19937_64 rng(31);
  const int dim = 8;
  for (int iter = 0; iter < 100; ++iter) {
    size_t n = 2 + rng() % 7;
    std::vector<Vec> reps;
    for (size_t i = 0; i < n; ++i) reps.push_back(random_unit(rng, dim));
    DuplicateHead h;
    h.W = random_mat(rng, dim);
    h.thresh = 0.1;

    auto got = cluster_duplicates(reps, h);

    // Oracle: breadth-first components over the pairwise relation, groups in
    // first-member order.
    std::vector<std::vector<size_t>> want;
    std::vector<bool> seen(n, false);
    for (size_t i = 0; i < n; ++i) {
      if (seen[i]) continue;
      std::vector<size_t> frontier{i}, comp;
      seen[i] = true;
      while (!frontier.empty()) {
        size_t x = frontier.back();
        frontier.pop_back();
        comp.push_back(x);
        for (size_t y = 0; y < n; ++y)
          if (!seen[y] && is_duplicate(reps[x], reps[y], h)) {
            seen[y] = true;
            frontier.push_back(y);
          }
      }
      std::sort(comp.begin(), comp.end());
      want.push_back(comp);
    }
    std::sort(want.begin(), want.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    REQUIRE(got.size() == want.size());
    for (size_t g = 0; g < got.size(); ++g) CHECK(got[g] == want[g]);
  }
}

TEST_CASE("clustering groups chains through single linkage") {
  const int dim = 4;
  // Hand-built: a~b and b~c but not a~c; all three must land in one group.
  Vec a = Vec::Zero(dim), b = Vec::Zero(dim), c = Vec::Zero(dim);
  a[0] = 1.0;
  b[0] = std::sqrt(0.5);
  b[1] = std::sqrt(0.5);
  c[1] = 1.0;
  DuplicateHead h{Mat::Identity(dim, dim), 0.5};
  REQUIRE(is_duplicate(a, b, h));
  REQUIRE(is_duplicate(b, c, h));
  REQUIRE_FALSE(is_duplicate(a, c, h));
  auto groups = cluster_duplicates({a, b, c}, h);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0] == std::vector<size_t>{0, 1, 2});

  // With a high threshold everything is a singleton.
  h.thresh = 3.0;
  groups = cluster_duplicates({a, b, c}, h);
  REQUIRE(groups.size() == 3);
  CHECK(groups[0] == std::vector<size_t>{0});
  CHECK(groups[2] == std::vector<size_t>{2});

  CHECK(cluster_duplicates({}, h).empty());
}

TEST_CASE("init_model is seed deterministic with small entries") {
  EncoderConfig cfg{0, 16, 0.5};
  Model m1 = init_model(cfg, 42);
  Model m2 = init_model(cfg, 42);
  Model m3 = init_model(cfg, 43);

  CHECK((m1.span_detect.W_B - m2.span_detect.W_B).norm() == 0.0);
  CHECK((m1.column_detect.W_I - m2.column_detect.W_I).norm() == 0.0);
  CHECK((m1.duplicate_detect.W - m2.duplicate_detect.W).norm() == 0.0);
  CHECK((m1.span_detect.W_B - m3.span_detect.W_B).norm() > 0.0);

  CHECK(m1.span_detect.thresh_O == 0.0);
  CHECK(m1.column_detect.thresh_O == 0.0);
  CHECK(m1.duplicate_detect.thresh == 0.0);
  CHECK(m1.span_detect.W_B.rows() == 16);
  CHECK(m1.span_detect.W_B.cols() == 16);

  // Entries follow the 0.01/sqrt(d) scale: the sample standard deviation
  // over 5 * 256 draws should sit well within a factor of two of it.
  double scale = 0.01 / std::sqrt(16.0);
  double sq = m1.span_detect.W_B.squaredNorm() + m1.span_detect.W_I.squaredNorm() +
              m1.column_detect.W_B.squaredNorm() + m1.column_detect.W_I.squaredNorm() +
              m1.duplicate_detect.W.squaredNorm();
  double stddev = std::sqrt(sq / (5.0 * 16.0 * 16.0));
  CHECK(stddev > 0.5 * scale);
  CHECK(stddev < 2.0 * scale);
}

TEST_CASE("gaussian source is reproducible and roughly standard") {
  GaussianSource g1(99), g2(99), g3(100);
  bool all_equal = true;
  bool any_differ = false;
  double sum = 0.0, sumsq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double a = g1.next();
    double b = g2.next();
    double c = g3.next();
    all_equal = all_equal && (a == b);
    any_differ = any_differ || (a != c);
    sum += a;
    sumsq += a * a;
  }
  CHECK(all_equal);
  CHECK(any_differ);
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(var - 1.0) < 0.1);

  GaussianSource g4(1);
  for (int i = 0; i < 1000; ++i) {
    double u = g4.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
