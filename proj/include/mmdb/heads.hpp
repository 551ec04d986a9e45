#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mmdb/encoder.hpp"
#include "mmdb/types.hpp"

namespace mmdb {

enum class IOBTag { B, I, O };

// Bilinear span tagger. A token representation w and a cell representation c
// produce scores (w' W_B c, w' W_I c, thresh_O); the argmax is the tag and
// exact ties resolve in the order O, then B, then I.
struct TaggingHead {
  Mat W_B;
  Mat W_I;
  double thresh_O = 0.0;
};

// Bilinear duplicate scorer over span representations. The stored matrix is
// symmetrized at scoring time so the relation cannot depend on argument
// order.
struct DuplicateHead {
  Mat W;
  double thresh = 0.0;
};

// The trainable state of the engine: three heads over a fixed encoder.
//   span_detect     locates the value of one row's cell
//   column_detect   locates every value of a column
//   duplicate_detect decides whether two spans name the same entity
struct Model {
  EncoderConfig encoder;
  TaggingHead span_detect;
  TaggingHead column_detect;
  DuplicateHead duplicate_detect;
};

// Heads with seeded Gaussian entries of scale 0.01/sqrt(dim) and zero
// thresholds.
Model init_model(const EncoderConfig& config, uint64_t seed);

IOBTag iob_tag(const Vec& token_rep, const Vec& cell_rep, const TaggingHead& head);

// Tags every token of an encoding against one slot's cell representation.
std::vector<IOBTag> tag_sequence(const EncodingResult& enc, size_t slot,
                                 const TaggingHead& head);

// A decoded maximal span. The surface is the exact slice of the original
// text, so extracted values are verbatim quotations.
struct SpanCandidate {
  size_t tok_begin = 0;
  size_t tok_end = 0;  // exclusive
  CharRange range;
  std::string surface;
};

// Greedy IOB decoding: B starts a span, I extends the open span or starts
// one when no span is open, O closes. Tag count must match token count.
std::vector<SpanCandidate> decode_spans(const std::vector<IOBTag>& tags,
                                        const Document& doc);

// Normalized mean of the token representations in [tok_begin, tok_end).
Vec span_representation(const EncodingResult& enc, size_t tok_begin,
                        size_t tok_end);

double duplicate_score(const Vec& a, const Vec& b, const DuplicateHead& head);

// True when the symmetrized score strictly exceeds the threshold.
bool is_duplicate(const Vec& a, const Vec& b, const DuplicateHead& head);

// Single-linkage grouping: every pair is scored and connected components of
// the duplicate relation form the groups. Groups are ordered by their first
// member's position in the input, members ascending, so callers that pass
// spans in document order get document-ordered groups.
std::vector<std::vector<size_t>> cluster_duplicates(const std::vector<Vec>& span_reps,
                                                    const DuplicateHead& head);

// Seeded standard normal via Box-Muller over mt19937_64 draws; fully
// reproducible across platforms. Shared by head init and training.
class GaussianSource {
 public:
  explicit GaussianSource(uint64_t seed) : rng_(seed) {}
  double next();
  uint64_t next_u64() { return rng_(); }
  double next_unit();  // uniform in [0, 1)

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mmdb
