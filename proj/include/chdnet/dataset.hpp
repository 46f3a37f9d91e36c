#pragma once

#include "chdnet/common.hpp"

#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace chdnet {

/// Samples x peptides intensity table with one binary label per row.
///
/// Construction validates every invariant (shape agreement, unique feature
/// ids, finite values); instances are immutable afterwards.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(Matrix values, Labels labels, std::vector<std::string> feature_ids,
                 std::vector<std::string> sample_ids);

  const Matrix& values() const { return values_; }
  const Labels& labels() const { return labels_; }
  const std::vector<std::string>& feature_ids() const { return feature_ids_; }
  const std::vector<std::string>& sample_ids() const { return sample_ids_; }

  std::size_t samples() const { return labels_.size(); }
  std::size_t features() const { return feature_ids_.size(); }
  ClassCounts class_counts() const { return count_classes(labels_); }

  LabeledDataset select_rows(const IndexList& rows) const;
  LabeledDataset select_features(const IndexList& cols) const;
  LabeledDataset with_values(Matrix values) const;
  /// Rows of `this` followed by rows of `tail`; feature ids must agree.
  LabeledDataset append(const LabeledDataset& tail) const;

 private:
  Matrix values_;
  Labels labels_;
  std::vector<std::string> feature_ids_;
  std::vector<std::string> sample_ids_;
};

LabeledDataset read_csv(std::istream& in);
LabeledDataset load_csv(const std::filesystem::path& path);
/// Header `sample_id,label,<ids...>`, values at 17 significant digits, LF endings.
void write_csv(std::ostream& out, const LabeledDataset& data);
void save_csv(const std::filesystem::path& path, const LabeledDataset& data);

/// Fixed-cardinality, strictly increasing set of column indices.
class FeatureSubset {
 public:
  FeatureSubset() = default;
  /// Sorts `indices`; throws on duplicates or out-of-range entries.
  FeatureSubset(IndexList indices, std::size_t universe_size);

  static FeatureSubset all(std::size_t universe_size);

  const IndexList& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  std::size_t universe_size() const { return universe_; }
  bool contains(std::size_t index) const;

  friend bool operator==(const FeatureSubset&, const FeatureSubset&) = default;

 private:
  IndexList indices_;
  std::size_t universe_ = 0;
};

/// Per-feature z-score parameters fit on training rows.
struct Standardizer {
  Vector mean;
  Vector stddev;

  Index features() const { return mean.size(); }
  Matrix apply(const Matrix& x) const;
  Matrix invert(const Matrix& z) const;
  Standardizer restrict_to(const FeatureSubset& subset) const;
};

/// Column means and n-1 standard deviations; zero deviations become 1.
Standardizer fit_standardizer(const Matrix& x);
Standardizer fit_standardizer(const LabeledDataset& data);
LabeledDataset apply_standardizer(const Standardizer& std, const LabeledDataset& data);

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;

  IndexList test_indices(std::size_t fold) const;
  IndexList train_indices(std::size_t fold) const;
};

/// Per-class shuffle, then one continuous round-robin deal over the classes
/// in label order, so both per-class and total fold sizes differ by at most 1.
FoldPlan stratified_kfold(const Labels& labels, std::size_t k, std::uint64_t seed);

struct SplitIndices {
  IndexList train;
  IndexList holdout;
};

/// Per class, round(count * fraction) (at least 1) rows go to the holdout.
SplitIndices stratified_split(const Labels& labels, double holdout_fraction, std::uint64_t seed);

/// Indices of every row carrying `label`, ascending.
IndexList rows_with_label(const Labels& labels, Label label);

}  // namespace chdnet
