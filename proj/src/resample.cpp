#include "chdnet/resample.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <random>

namespace chdnet {

namespace {

Label minority_label(const ClassCounts& c) { return c.cases <= c.controls ? Label::Case : Label::Control; }

/// Indices (into `points` rows) of the k nearest other rows, by squared
/// Euclidean distance, ties broken by lower index.
std::vector<IndexList> nearest_neighbors(const Matrix& points, std::size_t k) {
  const Index n = points.rows();
  const Vector sq = points.rowwise().squaredNorm();
  const Matrix gram = points * points.transpose();
  std::vector<IndexList> out(static_cast<std::size_t>(n));
  std::vector<std::pair<double, std::size_t>> dist;
  for (Index i = 0; i < n; ++i) {
    dist.clear();
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = std::max(0.0, sq(i) + sq(j) - 2.0 * gram(i, j));
      dist.emplace_back(d, static_cast<std::size_t>(j));
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    auto& nn = out[static_cast<std::size_t>(i)];
    for (std::size_t m = 0; m < k; ++m) nn.push_back(dist[m].second);
  }
  return out;
}

}  // namespace

LabeledDataset smote(const LabeledDataset& data, const SmoteConfig& cfg) {
  if (!cfg.standardize_distances) return smote(data, cfg, nullptr);
  const auto space = fit_standardizer(data);
  return smote(data, cfg, &space);
}

LabeledDataset smote(const LabeledDataset& data, const SmoteConfig& cfg, const Standardizer* distance_space) {
  const auto counts = data.class_counts();
  const Label minority = minority_label(counts);
  const std::size_t current = counts[minority];
  const std::size_t target = cfg.target_minority_count.value_or(counts[other(minority)]);
  if (current < 2) throw Error(ErrorKind::InvalidInput, "SMOTE needs at least 2 minority samples");
  if (cfg.k_neighbors < 1) throw Error(ErrorKind::Config, "SMOTE k_neighbors must be >= 1");
  if (target < current) throw Error(ErrorKind::Config, "SMOTE target is below the current minority count");
  if (target == current) return data;

  std::size_t k = cfg.k_neighbors;
  if (k > current - 1) {
    std::cerr << "warning: SMOTE k_neighbors " << k << " clamped to " << current - 1 << '\n';
    k = current - 1;
  }

  const IndexList members = rows_with_label(data.labels(), minority);
  const Matrix raw = take_rows(data.values(), members);
  const Matrix metric = distance_space ? distance_space->apply(raw) : raw;
  const auto neighbors = nearest_neighbors(metric, k);

  const std::size_t needed = target - current;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick_base(0, current - 1);
  std::uniform_int_distribution<std::size_t> pick_nn(0, k - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Matrix synth(static_cast<Index>(needed), raw.cols());
  std::vector<std::string> ids;
  ids.reserve(needed);
  for (std::size_t s = 0; s < needed; ++s) {
    const auto base = pick_base(rng);
    const auto nn = neighbors[base][pick_nn(rng)];
    const double lambda = unit(rng);
    const auto x = raw.row(static_cast<Index>(base));
    synth.row(static_cast<Index>(s)) = x + lambda * (raw.row(static_cast<Index>(nn)) - x);
    ids.push_back("synthetic-" + std::to_string(s + 1));
  }
  return data.append(LabeledDataset(std::move(synth), Labels(needed, minority), data.feature_ids(), std::move(ids)));
}

LabeledDataset replicate_oversample(const LabeledDataset& data, std::uint64_t seed) {
  const auto counts = data.class_counts();
  if (counts.cases == 0 || counts.controls == 0)
    throw Error(ErrorKind::InvalidInput, "replication needs both classes present");
  const Label minority = minority_label(counts);
  const std::size_t needed = counts[other(minority)] - counts[minority];
  if (needed == 0) return data;

  const IndexList members = rows_with_label(data.labels(), minority);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
  IndexList rows(needed);
  for (auto& r : rows) r = members[pick(rng)];

  std::vector<std::string> ids;
  ids.reserve(needed);
  for (std::size_t s = 0; s < needed; ++s) ids.push_back(data.sample_ids()[rows[s]] + "#rep" + std::to_string(s + 1));
  return data.append(
      LabeledDataset(take_rows(data.values(), rows), Labels(needed, minority), data.feature_ids(), std::move(ids)));
}

}  // namespace chdnet
