#pragma once

#include "chdnet/dataset.hpp"

#include <iosfwd>

namespace chdnet {

/// Log-normal proteome with a handful of planted, class-shifted peptides.
struct SynthConfig {
  std::size_t n_cases = 82;
  std::size_t n_controls = 345;
  std::size_t n_features = 5605;
  std::size_t n_informative = 50;
  /// Case-vs-control mean shift of a planted feature, in log-space stddevs.
  double effect_size = 1.5;
  /// Median intensity of a typical peptide.
  double median_intensity = 1e4;
  /// Spread of per-peptide log medians around log(median_intensity).
  double log_median_spread = 1.0;
  /// Within-peptide log-space standard deviation.
  double log_sigma = 0.5;
  std::uint64_t seed = 0;

  std::vector<std::string> violations() const;
};

struct PlantedFeature {
  std::size_t index = 0;
  int direction = 1;  // +1: higher in cases, -1: lower
};

struct SynthResult {
  LabeledDataset data;
  std::vector<PlantedFeature> planted;  // ascending index
};

/// Cases come first, then controls. Feature ids are `pep_00001`...
SynthResult generate(const SynthConfig& cfg);

/// `feature_index,feature_id,direction`
void write_planted_csv(std::ostream& out, const SynthResult& result);

/// Welch two-sample t statistic (cases minus controls) for every column.
Vector two_sample_t(const LabeledDataset& data);

}  // namespace chdnet
