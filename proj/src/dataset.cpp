#include "chdnet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace chdnet {

LabeledDataset::LabeledDataset(Matrix values, Labels labels, std::vector<std::string> feature_ids,
                               std::vector<std::string> sample_ids)
    : values_(std::move(values)),
      labels_(std::move(labels)),
      feature_ids_(std::move(feature_ids)),
      sample_ids_(std::move(sample_ids)) {
  if (static_cast<std::size_t>(values_.rows()) != labels_.size() || labels_.size() != sample_ids_.size())
    throw Error(ErrorKind::Dimension, "row count, label count and sample id count disagree");
  if (static_cast<std::size_t>(values_.cols()) != feature_ids_.size())
    throw Error(ErrorKind::Dimension, "column count and feature id count disagree");
  std::unordered_set<std::string> seen;
  for (const auto& id : feature_ids_)
    if (!seen.insert(id).second) throw Error(ErrorKind::InvalidInput, "duplicate feature id '" + id + "'");
  if (!values_.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite intensity in dataset");
}

LabeledDataset LabeledDataset::select_rows(const IndexList& rows) const {
  Labels labels;
  std::vector<std::string> ids;
  labels.reserve(rows.size());
  ids.reserve(rows.size());
  for (auto r : rows) {
    labels.push_back(labels_.at(r));
    ids.push_back(sample_ids_[r]);
  }
  return LabeledDataset(take_rows(values_, rows), std::move(labels), feature_ids_, std::move(ids));
}

LabeledDataset LabeledDataset::select_features(const IndexList& cols) const {
  std::vector<std::string> ids;
  ids.reserve(cols.size());
  for (auto c : cols) ids.push_back(feature_ids_.at(c));
  return LabeledDataset(take_cols(values_, cols), labels_, std::move(ids), sample_ids_);
}

LabeledDataset LabeledDataset::with_values(Matrix values) const {
  return LabeledDataset(std::move(values), labels_, feature_ids_, sample_ids_);
}

LabeledDataset LabeledDataset::append(const LabeledDataset& tail) const {
  if (tail.feature_ids_ != feature_ids_) throw Error(ErrorKind::Dimension, "appended rows use different features");
  Matrix v(values_.rows() + tail.values_.rows(), values_.cols());
  v << values_, tail.values_;
  Labels labels = labels_;
  labels.insert(labels.end(), tail.labels_.begin(), tail.labels_.end());
  auto ids = sample_ids_;
  ids.insert(ids.end(), tail.sample_ids_.begin(), tail.sample_ids_.end());
  return LabeledDataset(std::move(v), std::move(labels), feature_ids_, std::move(ids));
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void fail_at(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

LabeledDataset read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line()) throw Error(ErrorKind::Parse, "empty file: missing header row");
  const auto header = split_fields(line);
  if (header.size() < 2 || header[0] != "sample_id" || header[1] != "label")
    fail_at(line_no, "header must start with 'sample_id,label'");
  std::vector<std::string> feature_ids;
  std::unordered_set<std::string_view> seen;
  for (std::size_t j = 2; j < header.size(); ++j) {
    if (header[j].empty()) fail_at(line_no, "empty feature id in header column " + std::to_string(j + 1));
    if (!seen.insert(header[j]).second) fail_at(line_no, "duplicate header field '" + std::string(header[j]) + "'");
    feature_ids.emplace_back(header[j]);
  }
  if (feature_ids.empty()) fail_at(line_no, "header has no feature columns");

  const std::size_t width = feature_ids.size();
  std::vector<double> flat;
  Labels labels;
  std::vector<std::string> sample_ids;
  while (next_line()) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != width + 2)
      fail_at(line_no, "expected " + std::to_string(width + 2) + " fields, found " + std::to_string(fields.size()));
    if (fields[0].empty()) fail_at(line_no, "empty sample_id");
    sample_ids.emplace_back(fields[0]);
    try {
      labels.push_back(parse_label(fields[1]));
    } catch (const Error& e) {
      fail_at(line_no, e.what());
    }
    for (std::size_t j = 0; j < width; ++j) {
      auto f = fields[j + 2];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size())
        fail_at(line_no, "non-numeric intensity '" + std::string(f) + "' in column " + feature_ids[j]);
      if (!std::isfinite(v)) fail_at(line_no, "non-finite intensity in column " + feature_ids[j]);
      flat.push_back(v);
    }
  }
  if (labels.empty()) throw Error(ErrorKind::InvalidInput, "empty dataset");

  const auto rows = static_cast<Index>(labels.size());
  Matrix values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), rows, static_cast<Index>(width));
  return LabeledDataset(std::move(values), std::move(labels), std::move(feature_ids), std::move(sample_ids));
}

LabeledDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_csv(in);
}

void write_csv(std::ostream& out, const LabeledDataset& data) {
  out << "sample_id,label";
  for (const auto& id : data.feature_ids()) out << ',' << id;
  out << '\n';
  const Matrix& v = data.values();
  for (Index i = 0; i < v.rows(); ++i) {
    out << data.sample_ids()[i] << ',' << to_string(data.labels()[i]);
    for (Index j = 0; j < v.cols(); ++j) out << ',' << format_double17(v(i, j));
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const LabeledDataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_csv(out, data);
}

FeatureSubset::FeatureSubset(IndexList indices, std::size_t universe_size)
    : indices_(std::move(indices)), universe_(universe_size) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
    throw Error(ErrorKind::InvalidInput, "feature subset has duplicate indices");
  if (!indices_.empty() && indices_.back() >= universe_)
    throw Error(ErrorKind::InvalidInput, "feature index out of range");
}

FeatureSubset FeatureSubset::all(std::size_t universe_size) {
  IndexList idx(universe_size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return FeatureSubset(std::move(idx), universe_size);
}

bool FeatureSubset::contains(std::size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) throw Error(ErrorKind::Dimension, "standardizer feature count mismatch");
  return ((x.rowwise() - mean.transpose()).array().rowwise() / stddev.transpose().array()).matrix();
}

Matrix Standardizer::invert(const Matrix& z) const {
  if (z.cols() != mean.size()) throw Error(ErrorKind::Dimension, "standardizer feature count mismatch");
  return ((z.array().rowwise() * stddev.transpose().array()).matrix().rowwise() + mean.transpose());
}

Standardizer Standardizer::restrict_to(const FeatureSubset& subset) const {
  Standardizer s{Vector(static_cast<Index>(subset.size())), Vector(static_cast<Index>(subset.size()))};
  for (std::size_t j = 0; j < subset.size(); ++j) {
    s.mean(static_cast<Index>(j)) = mean(static_cast<Index>(subset.indices()[j]));
    s.stddev(static_cast<Index>(j)) = stddev(static_cast<Index>(subset.indices()[j]));
  }
  return s;
}

Standardizer fit_standardizer(const Matrix& x) {
  if (x.rows() < 2) throw Error(ErrorKind::InvalidInput, "standardizer needs at least 2 samples");
  Standardizer s;
  s.mean = x.colwise().mean().transpose();
  s.stddev = ((x.rowwise() - s.mean.transpose()).colwise().squaredNorm().transpose() / double(x.rows() - 1))
                 .cwiseSqrt();
  for (Index j = 0; j < s.stddev.size(); ++j)
    if (!(s.stddev(j) > 0.0)) s.stddev(j) = 1.0;
  return s;
}

Standardizer fit_standardizer(const LabeledDataset& data) { return fit_standardizer(data.values()); }

LabeledDataset apply_standardizer(const Standardizer& std, const LabeledDataset& data) {
  return data.with_values(std.apply(data.values()));
}

IndexList FoldPlan::test_indices(std::size_t fold) const {
  IndexList out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) out.push_back(i);
  return out;
}

IndexList FoldPlan::train_indices(std::size_t fold) const {
  IndexList out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != fold) out.push_back(i);
  return out;
}

IndexList rows_with_label(const Labels& labels, Label label) {
  IndexList out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) out.push_back(i);
  return out;
}

FoldPlan stratified_kfold(const Labels& labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::InvalidInput, "k-fold needs k >= 2");
  FoldPlan plan{k, std::vector<std::size_t>(labels.size(), 0)};
  std::mt19937_64 rng(seed);
  std::size_t dealt = 0;
  for (Label l : {Label::Case, Label::Control}) {
    auto members = rows_with_label(labels, l);
    if (members.size() < k)
      throw Error(ErrorKind::InvalidInput, "class '" + std::string(to_string(l)) + "' has " +
                                               std::to_string(members.size()) + " members, fewer than k = " +
                                               std::to_string(k));
    std::shuffle(members.begin(), members.end(), rng);
    for (auto idx : members) plan.assignments[idx] = dealt++ % k;
  }
  return plan;
}

SplitIndices stratified_split(const Labels& labels, double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw Error(ErrorKind::InvalidInput, "holdout fraction must lie in (0, 1)");
  SplitIndices out;
  std::mt19937_64 rng(seed);
  for (Label l : {Label::Case, Label::Control}) {
    auto members = rows_with_label(labels, l);
    const auto n = members.size();
    const auto h = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(double(n) * holdout_fraction)));
    if (n < 2 || h >= n)
      throw Error(ErrorKind::InvalidInput, "holdout fraction empties one side of class '" +
                                               std::string(to_string(l)) + "'");
    std::shuffle(members.begin(), members.end(), rng);
    out.holdout.insert(out.holdout.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(h));
    out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(h), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.holdout.begin(), out.holdout.end());
  return out;
}

}  // namespace chdnet
