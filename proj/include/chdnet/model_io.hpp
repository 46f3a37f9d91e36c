#pragma once

#include "chdnet/dataset.hpp"
#include "chdnet/mlp.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace chdnet {

/// Everything needed to score raw intensities: the columns to keep, their
/// z-score parameters and the network. Layout is described in docs/formats.md.
struct ModelBundle {
  MlpModel model;
  Standardizer standardizer;  // one entry per selected feature
  FeatureSubset subset;
  std::vector<std::string> feature_ids;  // ids of the selected features
  std::string provenance;                // single-line JSON
};

inline constexpr std::string_view kModelMagic = "CHDNET-MLP";
inline constexpr int kModelFormatVersion = 1;

void write_model(std::ostream& out, const ModelBundle& bundle);
ModelBundle read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle load_model(const std::filesystem::path& path);

/// Selects, standardizes and scores `data`; throws when the bundle's feature
/// ids are not present at the recorded columns.
Matrix bundle_inputs(const ModelBundle& bundle, const LabeledDataset& data);

}  // namespace chdnet
