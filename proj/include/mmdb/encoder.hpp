#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mmdb/types.hpp"

namespace mmdb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One cell of the row context handed to the encoder. A slot without a value
// is masked and marks an attribute whose value should be located in the
// text. `table_prefix`, when set, is prepended to the column name before
// embedding so that same-named columns of different member tables encode
// differently. `mask_name` hides the column name (used during training).
struct ColumnSlot {
  ColumnDef column;
  std::optional<std::string> value;
  std::string table_prefix;
  bool mask_name = false;

  bool masked() const { return !value.has_value(); }
};

// Per-call encoder output: one unit-norm vector per token and one per slot.
struct EncodingResult {
  std::vector<Vec> token_reps;
  std::vector<Vec> cell_reps;
};

// Base class for token/cell encoders. Encoders are immutable after
// construction and encode() is a pure function of its inputs, so calls may
// run concurrently; the invocation counters are atomic. Each encode() and
// encode_cells() call counts as one invocation. encode_example_cells()
// embeds a whole batch of rows in one pass and therefore counts once no
// matter how many rows it receives.
class Encoder {
 public:
  virtual ~Encoder() = default;

  EncodingResult encode(const Document& doc,
                        const std::vector<ColumnSlot>& slots) const {
    ++calls_;
    return do_encode(doc, slots);
  }

  // Cell representations for one row without a document context.
  std::vector<Vec> encode_cells(const std::vector<ColumnSlot>& slots) const {
    ++calls_;
    return do_encode_cells(slots);
  }

  // Cell representations for several example rows. `slot_template` fixes the
  // column order; each row supplies values for a subset of the columns and
  // missing cells are encoded masked.
  std::vector<std::vector<Vec>> encode_example_cells(
      const std::vector<ColumnSlot>& slot_template,
      const std::vector<Row>& rows) const;

  int dim() const { return dim_; }
  uint64_t invocations() const { return calls_.load(); }
  uint64_t example_invocations() const { return example_calls_.load(); }

 protected:
  explicit Encoder(int dim) : dim_(dim) {}

 private:
  virtual EncodingResult do_encode(const Document& doc,
                                   const std::vector<ColumnSlot>& slots) const = 0;
  virtual std::vector<Vec> do_encode_cells(
      const std::vector<ColumnSlot>& slots) const = 0;

  int dim_;
  mutable std::atomic<uint64_t> calls_{0};
  mutable std::atomic<uint64_t> example_calls_{0};
};

struct EncoderConfig {
  uint64_t seed = 0;
  int dim = 64;
  // Weight of neighbor embeddings in the token mixing window and of the
  // provided-value context mixed into masked cells.
  double mix_weight = 0.5;

  bool operator==(const EncoderConfig& o) const {
    return seed == o.seed && dim == o.dim && mix_weight == o.mix_weight;
  }
};

// Deterministic hash-based encoder. Token embeddings are pseudo-random unit
// vectors keyed by the token surface and the seed; token representations mix
// each embedding with its immediate neighbors; cell representations pool
// column name, dtype, and value (or a reserved mask embedding), and masked
// cells additionally absorb the values provided in sibling slots so that
// extraction can be conditioned on them.
class ReferenceEncoder : public Encoder {
 public:
  explicit ReferenceEncoder(EncoderConfig config);

  const EncoderConfig& config() const { return config_; }

  // Embedding of a single token surface; exposed for analysis and tests.
  Vec token_embedding(const std::string& surface) const;

 private:
  EncodingResult do_encode(const Document& doc,
                           const std::vector<ColumnSlot>& slots) const override;
  std::vector<Vec> do_encode_cells(
      const std::vector<ColumnSlot>& slots) const override;

  Vec cell_rep(const ColumnSlot& slot, const Vec* context) const;
  Vec provided_context(const std::vector<ColumnSlot>& slots) const;

  EncoderConfig config_;
};

// L2-normalized arithmetic mean. Throws InvalidArgument on an empty list.
Vec column_representation(const std::vector<Vec>& reps);

// Normalizes v to unit length; returns v unchanged when its norm is zero.
Vec l2_normalize(const Vec& v);

// Memoizes example-row encodings keyed by the slot template and row
// contents, so repeated extraction over many documents encodes the example
// rows once.
class ExampleEncodingCache {
 public:
  // Cell representations per example row, computed on first use.
  const std::vector<std::vector<Vec>>& get(const Encoder& enc,
                                           const std::vector<ColumnSlot>& slot_template,
                                           const std::vector<Row>& rows);

 private:
  std::map<std::string, std::vector<std::vector<Vec>>> cache_;
};

// encode() plus example-row enrichment: every masked slot's representation
// is replaced by the normalized mean of the example cells of its column
// together with the slot's own representation. With no example rows the
// result is exactly encode(doc, slots).
EncodingResult encode_with_examples(const Encoder& enc, const Document& doc,
                                    const std::vector<ColumnSlot>& slots,
                                    const std::vector<Row>& example_rows,
                                    ExampleEncodingCache* cache = nullptr);

// Masked slot for a column. The identifying column of a multi-table member
// carries the member name as prefix so that keys of different member tables
// embed differently.
ColumnSlot slot_for(const TextTableDef& def, const std::string& member,
                    const ColumnDef& col);

}  // namespace mmdb
