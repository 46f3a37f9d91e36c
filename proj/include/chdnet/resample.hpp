#pragma once

#include "chdnet/dataset.hpp"

#include <optional>

namespace chdnet {

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  /// Final minority count; empty means "match the majority class".
  std::optional<std::size_t> target_minority_count;
  /// Measure neighbor distances on z-scored features instead of raw values.
  bool standardize_distances = true;
  std::uint64_t seed = 0;
};

/// Appends synthetic minority rows x + lambda * (x_nn - x), lambda ~ U[0, 1],
/// where x is drawn uniformly from the minority class and x_nn uniformly from
/// its k nearest minority neighbors. Originals come first, unchanged.
///
/// k_neighbors above minority_count - 1 is clamped (with a warning on stderr).
/// Synthetic rows are named `synthetic-<n>`, n counting from 1.
LabeledDataset smote(const LabeledDataset& data, const SmoteConfig& cfg);

/// Same as smote(), measuring distances through `distance_space` when given.
LabeledDataset smote(const LabeledDataset& data, const SmoteConfig& cfg, const Standardizer* distance_space);

/// Duplicates minority rows (uniform draws with replacement) until both
/// classes have the majority count. Copies are named `<id>#rep<n>`.
LabeledDataset replicate_oversample(const LabeledDataset& data, std::uint64_t seed);

}  // namespace chdnet
