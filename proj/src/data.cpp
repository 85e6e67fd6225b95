#include "adapair/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>

#include "adapair/error.hpp"
#include "adapair/rng.hpp"

namespace adapair {

// ---------------------------------------------------------------------------
// SparseVector

double SparseVector::dot(std::span<const double> dense) const noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) acc += values[k] * dense[indices[k]];
  return acc;
}

double SparseVector::squared_norm() const noexcept {
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return acc;
}

void SparseVector::validate() const {
  if (indices.size() != values.size()) throw ConfigError("sparse vector: index/value length mismatch");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (k > 0 && indices[k] <= indices[k - 1]) throw ConfigError("sparse vector: indices not strictly increasing");
    if (indices[k] >= dim) throw ConfigError("sparse vector: index out of range");
    if (!std::isfinite(values[k])) throw ConfigError("sparse vector: non-finite value");
    if (values[k] == 0.0) throw ConfigError("sparse vector: explicit zero stored");
  }
}

SparseVector sparse_from_dense(std::span<const double> dense) {
  SparseVector out;
  out.dim = dense.size();
  for (std::size_t c = 0; c < dense.size(); ++c) {
    if (dense[c] != 0.0) {
      out.indices.push_back(static_cast<FeatureIndex>(c));
      out.values.push_back(dense[c]);
    }
  }
  return out;
}

SparseVector difference(const SparseVector& a, const SparseVector& b) {
  SparseVector out;
  difference_into(a, b, out);
  return out;
}

void difference_into(const SparseVector& a, const SparseVector& b, SparseVector& out) {
  if (a.dim != b.dim) throw DimensionError("difference: dimension mismatch");
  out.dim = a.dim;
  out.indices.clear();
  out.values.clear();
  std::size_t i = 0, j = 0;
  auto push = [&](FeatureIndex c, double v) {
    if (v != 0.0) {
      out.indices.push_back(c);
      out.values.push_back(v);
    }
  };
  while (i < a.nnz() || j < b.nnz()) {
    if (j == b.nnz() || (i < a.nnz() && a.indices[i] < b.indices[j])) {
      push(a.indices[i], a.values[i]);
      ++i;
    } else if (i == a.nnz() || b.indices[j] < a.indices[i]) {
      push(b.indices[j], -b.values[j]);
      ++j;
    } else {
      push(a.indices[i], a.values[i] - b.values[j]);
      ++i;
      ++j;
    }
  }
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::shared_ptr<const Storage> storage, std::vector<RowId> ids)
    : storage_(std::move(storage)), ids_(std::move(ids)) {
  index_classes();
}

void Dataset::index_classes() {
  pos_.clear();
  neg_.clear();
  for (std::uint32_t k = 0; k < ids_.size(); ++k) {
    (storage_->labels[ids_[k]] > 0 ? pos_ : neg_).push_back(k);
  }
}

Dataset Dataset::from_rows(std::vector<SparseVector> rows, std::vector<int> labels, std::size_t dim) {
  if (rows.size() != labels.size()) throw ConfigError("dataset: rows and labels differ in length");
  for (auto& r : rows) {
    if (r.dim > dim) throw DimensionError("dataset: row dimension exceeds dataset dimension");
    r.dim = dim;
    r.validate();
  }
  for (int y : labels) {
    if (y != 1 && y != -1) throw ConfigError("dataset: labels must be +1 or -1");
  }
  auto storage = std::make_shared<Storage>();
  storage->rows = std::move(rows);
  storage->labels = std::move(labels);
  storage->dim = dim;
  std::vector<RowId> ids(storage->rows.size());
  std::iota(ids.begin(), ids.end(), RowId{0});
  return Dataset(std::move(storage), std::move(ids));
}

std::size_t Dataset::dim() const noexcept { return storage_ ? storage_->dim : 0; }

const SparseVector& Dataset::row(std::size_t position) const noexcept {
  return storage_->rows[ids_[position]];
}

int Dataset::label(std::size_t position) const noexcept { return storage_->labels[ids_[position]]; }

std::vector<int> Dataset::labels() const {
  std::vector<int> out(size());
  for (std::size_t k = 0; k < size(); ++k) out[k] = label(k);
  return out;
}

Dataset Dataset::select(std::span<const std::uint32_t> positions) const {
  std::vector<RowId> ids;
  ids.reserve(positions.size());
  for (auto p : positions) {
    if (p >= ids_.size()) throw ConfigError("dataset: position out of range");
    ids.push_back(ids_[p]);
  }
  return Dataset(storage_, std::move(ids));
}

Dataset Dataset::with_replaced(std::size_t position, SparseVector row, int label) const {
  if (position >= size()) throw ConfigError("dataset: replaced position out of range");
  std::vector<SparseVector> rows;
  std::vector<int> labels;
  rows.reserve(size());
  labels.reserve(size());
  for (std::size_t k = 0; k < size(); ++k) {
    rows.push_back(k == position ? row : this->row(k));
    labels.push_back(k == position ? label : this->label(k));
  }
  return from_rows(std::move(rows), std::move(labels), dim());
}

Dataset Dataset::scaled(std::span<const double> factors) const {
  if (factors.size() != dim()) throw DimensionError("scale: factor count differs from dimension");
  std::vector<SparseVector> rows;
  std::vector<int> labels;
  rows.reserve(size());
  for (std::size_t k = 0; k < size(); ++k) {
    SparseVector r = row(k);
    std::size_t kept = 0;
    for (std::size_t e = 0; e < r.nnz(); ++e) {
      const double v = r.values[e] * factors[r.indices[e]];
      if (v != 0.0) {
        r.indices[kept] = r.indices[e];
        r.values[kept] = v;
        ++kept;
      }
    }
    r.indices.resize(kept);
    r.values.resize(kept);
    rows.push_back(std::move(r));
    labels.push_back(label(k));
  }
  return from_rows(std::move(rows), std::move(labels), dim());
}

// ---------------------------------------------------------------------------
// LIBSVM text

namespace {

bool parse_real(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

bool parse_index(std::string_view token, long long& out) {
  if (token.empty()) return false;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

RawDataset parse_libsvm(std::string_view text) {
  RawDataset out;
  std::size_t line_no = 0;
  std::size_t max_index = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    std::vector<std::string_view> tokens;
    std::size_t p = 0;
    while (p < line.size()) {
      while (p < line.size() && is_space(line[p])) ++p;
      const std::size_t start = p;
      while (p < line.size() && !is_space(line[p])) ++p;
      if (p > start) tokens.push_back(line.substr(start, p - start));
    }
    if (tokens.empty()) continue;

    double label = 0.0;
    if (!parse_real(tokens[0], label) || !std::isfinite(label)) {
      throw ParseError(line_no, "malformed label '" + std::string(tokens[0]) + "'");
    }
    SparseVector row;
    long long previous = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      long long index = 0;
      double value = 0.0;
      if (colon == std::string_view::npos || !parse_index(tok.substr(0, colon), index) ||
          !parse_real(tok.substr(colon + 1), value)) {
        throw ParseError(line_no, "malformed token '" + std::string(tok) + "'");
      }
      if (index <= 0) throw ParseError(line_no, "feature index must be >= 1, got " + std::to_string(index));
      if (index > static_cast<long long>(UINT32_MAX)) throw ParseError(line_no, "feature index too large");
      if (index <= previous) throw ParseError(line_no, "feature indices not ascending at '" + std::string(tok) + "'");
      if (!std::isfinite(value)) throw ParseError(line_no, "non-finite feature value");
      previous = index;
      max_index = std::max(max_index, static_cast<std::size_t>(index));
      if (value != 0.0) {
        row.indices.push_back(static_cast<FeatureIndex>(index - 1));
        row.values.push_back(value);
      }
    }
    out.rows.push_back(std::move(row));
    out.raw_labels.push_back(label);
  }
  out.dim = max_index;
  for (auto& r : out.rows) r.dim = max_index;
  return out;
}

RawDataset read_libsvm_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open data file " + path.string());
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_libsvm(text);
}

namespace {

void append_row(std::string& out, const std::string& label, const SparseVector& row) {
  out += label;
  for (std::size_t e = 0; e < row.nnz(); ++e) {
    out += ' ';
    out += std::to_string(row.indices[e] + 1);
    out += ':';
    out += format_real(row.values[e]);
  }
  out += '\n';
}

}  // namespace

std::string serialize_libsvm(const RawDataset& data) {
  std::string out;
  for (std::size_t k = 0; k < data.rows.size(); ++k) append_row(out, format_real(data.raw_labels[k]), data.rows[k]);
  return out;
}

std::string serialize_libsvm(const Dataset& data) {
  std::string out;
  for (std::size_t k = 0; k < data.size(); ++k) append_row(out, data.label(k) > 0 ? "+1" : "-1", data.row(k));
  return out;
}

// ---------------------------------------------------------------------------
// Labels, splits, stages

std::vector<int> binarize(std::span<const double> raw_labels, std::uint64_t seed) {
  std::vector<double> distinct(raw_labels.begin(), raw_labels.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw ConfigError("degenerate labels: fewer than two distinct label values");

  std::vector<double> positive_values;
  if (distinct.size() == 2) {
    positive_values = {distinct[1]};
  } else {
    Rng rng(seed, 0xB1);
    shuffle(distinct.begin(), distinct.end(), rng);
    positive_values.assign(distinct.begin(), distinct.begin() + static_cast<std::ptrdiff_t>(distinct.size() / 2));
    std::sort(positive_values.begin(), positive_values.end());
  }
  std::vector<int> out;
  out.reserve(raw_labels.size());
  for (double y : raw_labels) {
    out.push_back(std::binary_search(positive_values.begin(), positive_values.end(), y) ? 1 : -1);
  }
  return out;
}

Dataset make_dataset(RawDataset raw, std::uint64_t label_seed) {
  std::vector<int> labels;
  if (!raw.rows.empty()) labels = binarize(raw.raw_labels, label_seed);
  return Dataset::from_rows(std::move(raw.rows), std::move(labels), raw.dim);
}

Dataset load_dataset(const std::filesystem::path& path, std::uint64_t label_seed) {
  return make_dataset(read_libsvm_file(path), label_seed);
}

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw ConfigError("split: train fraction must lie in (0, 1)");
  }
  if (ds.size() < 2) throw ConfigError("split: need at least two rows");
  if (!ds.has_both_classes()) throw ClassEmptyError("split: dataset lacks a class");

  std::vector<std::uint32_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0U);
  Rng rng(spec.seed, 0x5B);
  shuffle(order.begin(), order.end(), rng);

  const auto n = static_cast<double>(ds.size());
  auto n_train = static_cast<std::size_t>(std::ceil(spec.train_fraction * n - 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, ds.size() - 1);
  const std::span<const std::uint32_t> all(order);
  Dataset train = ds.select(all.first(n_train));
  Dataset test = ds.select(all.subspan(n_train));
  if (!train.has_both_classes() || !test.has_both_classes()) {
    throw ClassEmptyError("class-empty split (seed " + std::to_string(spec.seed) + ")");
  }
  return {std::move(train), std::move(test)};
}

StagePermutation::StagePermutation(const Dataset& ds, std::uint64_t seed, bool stratify) : ds_(ds) {
  Rng rng(seed, 0x57A6E);
  if (!stratify) {
    order_.resize(ds.size());
    std::iota(order_.begin(), order_.end(), 0U);
    shuffle(order_.begin(), order_.end(), rng);
    return;
  }
  std::vector<std::uint32_t> pos(ds.pos_idx().begin(), ds.pos_idx().end());
  std::vector<std::uint32_t> neg(ds.neg_idx().begin(), ds.neg_idx().end());
  shuffle(pos.begin(), pos.end(), rng);
  shuffle(neg.begin(), neg.end(), rng);
  // Proportional interleave: take the class lagging furthest behind its
  // target share (k+1)·n_class/n. The second element is always of the other
  // class, so every prefix of length >= 2 holds both classes.
  const auto n = static_cast<long long>(ds.size());
  const auto np = static_cast<long long>(pos.size());
  const auto nn = static_cast<long long>(neg.size());
  long long ip = 0, in = 0;
  order_.reserve(ds.size());
  for (long long k = 0; k < n; ++k) {
    bool take_pos;
    if (ip == np) {
      take_pos = false;
    } else if (in == nn) {
      take_pos = true;
    } else if (k == 1) {
      take_pos = ip == 0;
    } else {
      take_pos = (k + 1) * np - ip * n >= (k + 1) * nn - in * n;
    }
    order_.push_back(take_pos ? pos[static_cast<std::size_t>(ip++)] : neg[static_cast<std::size_t>(in++)]);
  }
}

Dataset StagePermutation::prefix(std::size_t m) const {
  if (m == 0) throw ConfigError("stage prefix: size must be positive");
  if (m > order_.size()) throw ConfigError("stage prefix: size exceeds dataset");
  std::vector<std::uint32_t> chosen(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(chosen.begin(), chosen.end());
  Dataset out = ds_.select(chosen);
  if (!out.has_both_classes()) {
    throw ClassEmptyError("class-empty stage: prefix of size " + std::to_string(m) +
                          " lacks a class (use stratified stages)");
  }
  return out;
}

Dataset nested_prefix(const Dataset& ds, std::size_t m, std::uint64_t seed) {
  return StagePermutation(ds, seed).prefix(m);
}

// ---------------------------------------------------------------------------
// Synthetic data, scaling, subsampling

namespace {

void check_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 2) throw ConfigError("synthetic: n must be >= 2");
  if (spec.d < 1) throw ConfigError("synthetic: d must be >= 1");
  if (!(spec.class_balance > 0.0 && spec.class_balance < 1.0)) {
    throw ConfigError("synthetic: class_balance must lie in (0, 1)");
  }
  if (!std::isfinite(spec.separation)) throw ConfigError("synthetic: separation must be finite");
}

SparseVector draw_cloud_point(std::size_t d, double separation, int label, Rng& rng) {
  const double shift = (label > 0 ? 0.5 : -0.5) * separation / std::sqrt(static_cast<double>(d));
  std::vector<double> x(d);
  for (auto& v : x) v = shift + rng.normal();
  return sparse_from_dense(x);
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
  check_synthetic(spec);
  auto n_pos = static_cast<std::size_t>(std::llround(spec.class_balance * static_cast<double>(spec.n)));
  n_pos = std::clamp<std::size_t>(n_pos, 1, spec.n - 1);

  std::vector<int> labels(spec.n, -1);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_pos), 1);
  Rng order_rng(spec.seed, 0x5EED);
  shuffle(labels.begin(), labels.end(), order_rng);

  Rng rng(spec.seed, 0xC10D);
  std::vector<SparseVector> rows;
  rows.reserve(spec.n);
  for (int y : labels) rows.push_back(draw_cloud_point(spec.d, spec.separation, y, rng));
  return Dataset::from_rows(std::move(rows), std::move(labels), spec.d);
}

SparseVector draw_synthetic_example(const SyntheticSpec& spec, int label, std::uint64_t seed) {
  check_synthetic(spec);
  Rng rng(seed, 0xE1A);
  return draw_cloud_point(spec.d, spec.separation, label, rng);
}

std::vector<double> max_abs_factors(const Dataset& ds) {
  std::vector<double> maxabs(ds.dim(), 0.0);
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const auto& r = ds.row(k);
    for (std::size_t e = 0; e < r.nnz(); ++e) {
      maxabs[r.indices[e]] = std::max(maxabs[r.indices[e]], std::abs(r.values[e]));
    }
  }
  for (auto& m : maxabs) m = m > 0.0 ? 1.0 / m : 1.0;
  return maxabs;
}

Dataset subsample(const Dataset& ds, std::size_t count, std::uint64_t seed) {
  if (count >= ds.size()) return ds;
  std::vector<std::uint32_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0U);
  Rng rng(seed, 0x5AB);
  shuffle(order.begin(), order.end(), rng);
  order.resize(count);
  std::sort(order.begin(), order.end());
  return ds.select(order);
}

}  // namespace adapair
