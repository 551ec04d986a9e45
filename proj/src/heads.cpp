#include "mmdb/heads.hpp"

#include <cmath>
#include <numeric>

#include "mmdb/error.hpp"

namespace mmdb {

double GaussianSource::next_unit() {
  return static_cast<double>(rng_() >> 11) * (1.0 / 9007199254740992.0);
}

double GaussianSource::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 is kept away from zero so the log stays finite.
  double u1 = next_unit();
  double u2 = next_unit();
  if (u1 < 1e-300) u1 = 1e-300;
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

namespace {

Mat gaussian_matrix(int dim, GaussianSource& g, double scale) {
  Mat m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = scale * g.next();
  return m;
}

}  // namespace

Model init_model(const EncoderConfig& config, uint64_t seed) {
  Model m;
  m.encoder = config;
  GaussianSource g(seed ^ 0x9e3779b97f4a7c15ull);
  double scale = 0.01 / std::sqrt(static_cast<double>(config.dim));
  m.span_detect.W_B = gaussian_matrix(config.dim, g, scale);
  m.span_detect.W_I = gaussian_matrix(config.dim, g, scale);
  m.span_detect.thresh_O = 0.0;
  m.column_detect.W_B = gaussian_matrix(config.dim, g, scale);
  m.column_detect.W_I = gaussian_matrix(config.dim, g, scale);
  m.column_detect.thresh_O = 0.0;
  m.duplicate_detect.W = gaussian_matrix(config.dim, g, scale);
  m.duplicate_detect.thresh = 0.0;
  return m;
}

IOBTag iob_tag(const Vec& token_rep, const Vec& cell_rep, const TaggingHead& head) {
  double score_b = token_rep.dot(head.W_B * cell_rep);
  double score_i = token_rep.dot(head.W_I * cell_rep);
  // O wins every tie it takes part in, then B beats I.
  IOBTag tag = IOBTag::O;
  double best = head.thresh_O;
  if (score_b > best) {
    tag = IOBTag::B;
    best = score_b;
  }
  if (score_i > best) tag = IOBTag::I;
  return tag;
}

std::vector<IOBTag> tag_sequence(const EncodingResult& enc, size_t slot,
                                 const TaggingHead& head) {
  if (slot >= enc.cell_reps.size())
    throw InvalidArgument("slot index " + std::to_string(slot) +
                          " out of range for " +
                          std::to_string(enc.cell_reps.size()) + " slots");
  const Vec& c = enc.cell_reps[slot];
  // The cell side of both bilinear forms is fixed across tokens, so it is
  // folded once and each token costs a pair of dot products.
  Vec wb_c = head.W_B * c;
  Vec wi_c = head.W_I * c;
  std::vector<IOBTag> tags;
  tags.reserve(enc.token_reps.size());
  for (const auto& w : enc.token_reps) {
    double score_b = w.dot(wb_c);
    double score_i = w.dot(wi_c);
    IOBTag tag = IOBTag::O;
    double best = head.thresh_O;
    if (score_b > best) {
      tag = IOBTag::B;
      best = score_b;
    }
    if (score_i > best) tag = IOBTag::I;
    tags.push_back(tag);
  }
  return tags;
}

std::vector<SpanCandidate> decode_spans(const std::vector<IOBTag>& tags,
                                        const Document& doc) {
  if (tags.size() != doc.tokens.size())
    throw InvalidArgument("tag sequence length " + std::to_string(tags.size()) +
                          " does not match token count " +
                          std::to_string(doc.tokens.size()) + " of document '" +
                          doc.id + "'");
  std::vector<SpanCandidate> out;
  size_t open = tags.size();  // sentinel: no open span
  auto close = [&](size_t end_tok) {
    if (open == tags.size()) return;
    SpanCandidate s;
    s.tok_begin = open;
    s.tok_end = end_tok;
    s.range = CharRange{doc.tokens[open].begin, doc.tokens[end_tok - 1].end};
    s.surface = doc.text.substr(s.range.begin, s.range.end - s.range.begin);
    out.push_back(std::move(s));
    open = tags.size();
  };
  for (size_t i = 0; i < tags.size(); ++i) {
    switch (tags[i]) {
      case IOBTag::B:
        close(i);
        open = i;
        break;
      case IOBTag::I:
        if (open == tags.size()) open = i;  // orphan I starts a span
        break;
      case IOBTag::O:
        close(i);
        break;
    }
  }
  close(tags.size());
  return out;
}

Vec span_representation(const EncodingResult& enc, size_t tok_begin, size_t tok_end) {
  if (tok_begin >= tok_end || tok_end > enc.token_reps.size())
    throw InvalidArgument("empty or out-of-range token span [" +
                          std::to_string(tok_begin) + ", " +
                          std::to_string(tok_end) + ")");
  Vec sum = Vec::Zero(enc.token_reps.front().size());
  for (size_t i = tok_begin; i < tok_end; ++i) sum += enc.token_reps[i];
  sum /= static_cast<double>(tok_end - tok_begin);
  return l2_normalize(sum);
}

double duplicate_score(const Vec& a, const Vec& b, const DuplicateHead& head) {
  // Average of both argument orders; equal to scoring with (W + W')/2.
  return 0.5 * (a.dot(head.W * b) + b.dot(head.W * a));
}

bool is_duplicate(const Vec& a, const Vec& b, const DuplicateHead& head) {
  return duplicate_score(a, b, head) > head.thresh;
}

namespace {

// Plain union-find with path halving.
class UnionFind {
 public:
  explicit UnionFind(size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), size_t{0});
  }
  size_t find(size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);  // keep the smaller index as root
    parent_[b] = a;
  }

 private:
  std::vector<size_t> parent_;
};

}  // namespace

std::vector<std::vector<size_t>> cluster_duplicates(const std::vector<Vec>& span_reps,
                                                    const DuplicateHead& head) {
  UnionFind uf(span_reps.size());
  for (size_t i = 0; i < span_reps.size(); ++i)
    for (size_t j = i + 1; j < span_reps.size(); ++j)
      if (is_duplicate(span_reps[i], span_reps[j], head)) uf.unite(i, j);

  std::vector<std::vector<size_t>> groups;
  std::vector<long> group_of(span_reps.size(), -1);
  for (size_t i = 0; i < span_reps.size(); ++i) {
    size_t root = uf.find(i);
    if (group_of[root] < 0) {
      group_of[root] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<size_t>(group_of[root])].push_back(i);
  }
  return groups;
}

}  // namespace mmdb
