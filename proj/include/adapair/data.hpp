#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace adapair {

using FeatureIndex = std::uint32_t;
using RowId = std::uint32_t;

/// Sparse row: strictly increasing 0-based indices, finite non-zero values.
struct SparseVector {
  std::vector<FeatureIndex> indices;
  std::vector<double> values;
  std::size_t dim = 0;

  std::size_t nnz() const noexcept { return indices.size(); }
  double dot(std::span<const double> dense) const noexcept;
  double squared_norm() const noexcept;
  /// Throws ConfigError if any invariant is violated.
  void validate() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Builds a sparse vector from a dense one, dropping exact zeros.
SparseVector sparse_from_dense(std::span<const double> dense);

/// a - b over the union of supports; exact zeros are not stored.
SparseVector difference(const SparseVector& a, const SparseVector& b);
/// As difference(), reusing the storage of `out`.
void difference_into(const SparseVector& a, const SparseVector& b, SparseVector& out);

/// Output of the parser: rows plus the labels exactly as written in the file.
struct RawDataset {
  std::vector<SparseVector> rows;
  std::vector<double> raw_labels;
  std::size_t dim = 0;
};

/// Immutable labelled dataset with labels in {+1, -1}.
///
/// A Dataset is a view: an ordered list of row ids into shared storage. Splits,
/// stage prefixes and subsamples share the storage of their parent, so taking a
/// subset costs O(size of subset) and never copies feature data. Positions
/// (0..size()-1) index the view; row ids identify rows in the storage and are
/// stable across views.
class Dataset {
 public:
  Dataset() = default;

  /// Validates rows and labels; every row is re-dimensioned to `dim`.
  static Dataset from_rows(std::vector<SparseVector> rows, std::vector<int> labels, std::size_t dim);

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  std::size_t dim() const noexcept;
  std::size_t n_pos() const noexcept { return pos_.size(); }
  std::size_t n_neg() const noexcept { return neg_.size(); }
  bool has_both_classes() const noexcept { return !pos_.empty() && !neg_.empty(); }

  const SparseVector& row(std::size_t position) const noexcept;
  int label(std::size_t position) const noexcept;
  std::vector<int> labels() const;
  RowId row_id(std::size_t position) const noexcept { return ids_[position]; }
  std::span<const RowId> row_ids() const noexcept { return ids_; }

  /// Positions (not row ids) of positive / negative examples, ascending.
  std::span<const std::uint32_t> pos_idx() const noexcept { return pos_; }
  std::span<const std::uint32_t> neg_idx() const noexcept { return neg_; }

  /// New view over the given positions of this view, in the given order.
  Dataset select(std::span<const std::uint32_t> positions) const;

  /// Deep copy with the row at `position` replaced; other rows keep their
  /// positions. Used to build the perturbed training set S^i.
  Dataset with_replaced(std::size_t position, SparseVector row, int label) const;

  /// Deep copy whose features are multiplied column-wise by `factors`.
  Dataset scaled(std::span<const double> factors) const;

 private:
  struct Storage {
    std::vector<SparseVector> rows;
    std::vector<int> labels;
    std::size_t dim = 0;
  };

  Dataset(std::shared_ptr<const Storage> storage, std::vector<RowId> ids);
  void index_classes();

  std::shared_ptr<const Storage> storage_;
  std::vector<RowId> ids_;
  std::vector<std::uint32_t> pos_;
  std::vector<std::uint32_t> neg_;
};

/// Parses LIBSVM text: `<label> <idx>:<val> ...` per non-blank line, 1-based
/// strictly increasing indices. Throws ParseError naming the line.
RawDataset parse_libsvm(std::string_view text);
RawDataset read_libsvm_file(const std::filesystem::path& path);

/// LIBSVM text with shortest round-trip value formatting.
std::string serialize_libsvm(const RawDataset& data);
std::string serialize_libsvm(const Dataset& data);

/// Maps raw labels to {+1, -1}. Two distinct values: larger -> +1. More than
/// two: a seeded shuffle of the distinct values; the first floor(k/2) become
/// positive, the rest negative. One distinct value throws ConfigError.
std::vector<int> binarize(std::span<const double> raw_labels, std::uint64_t seed);

/// parse + binarize.
Dataset make_dataset(RawDataset raw, std::uint64_t label_seed);
Dataset load_dataset(const std::filesystem::path& path, std::uint64_t label_seed);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

/// Seeded permutation; the first ceil(train_fraction * n) rows go to train.
/// Throws ClassEmptyError if either side lacks a class.
std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

/// One seeded permutation of a dataset whose prefixes are the nested stage
/// subsets S_{m_1} ⊂ S_{m_2} ⊂ ... of adaptive training.
class StagePermutation {
 public:
  /// With `stratify`, positives and negatives are permuted separately and
  /// interleaved in proportion, so every prefix of size >= 2 has both classes.
  StagePermutation(const Dataset& ds, std::uint64_t seed, bool stratify = false);

  /// Rows at the first m permutation slots, listed in their original order
  /// (so prefix(n) is the dataset itself). Throws ConfigError for m == 0 or m > n
  /// and ClassEmptyError when the prefix lacks a class.
  Dataset prefix(std::size_t m) const;

  std::size_t size() const noexcept { return order_.size(); }

 private:
  Dataset ds_;
  std::vector<std::uint32_t> order_;
};

/// Convenience wrapper: StagePermutation(ds, seed).prefix(m).
Dataset nested_prefix(const Dataset& ds, std::size_t m, std::uint64_t seed);

struct SyntheticSpec {
  std::size_t n = 200;
  std::size_t d = 10;
  double separation = 2.0;
  double class_balance = 0.5;
  std::uint64_t seed = 0;
};

/// Two unit-variance Gaussian clouds centred at ±(separation/2)·u with
/// u = (1,...,1)/sqrt(d). round(class_balance·n) rows are positive.
Dataset generate_synthetic(const SyntheticSpec& spec);

/// Draws one example from the cloud of the given label of a synthetic spec.
SparseVector draw_synthetic_example(const SyntheticSpec& spec, int label, std::uint64_t seed);

/// Per-feature 1/max|x_c| computed on `ds` (1 for all-zero columns).
std::vector<double> max_abs_factors(const Dataset& ds);

/// Seeded uniform subsample of `count` rows (whole dataset if count >= n).
Dataset subsample(const Dataset& ds, std::size_t count, std::uint64_t seed);

}  // namespace adapair
