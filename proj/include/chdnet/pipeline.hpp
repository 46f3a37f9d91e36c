#pragma once

#include "chdnet/feature_select.hpp"
#include "chdnet/metrics.hpp"
#include "chdnet/resample.hpp"
#include "chdnet/scg.hpp"
#include "chdnet/synth.hpp"

#include <nlohmann/json.hpp>

namespace chdnet {

enum class BalanceMethod { Smote, Replicate, None };
enum class BalancePlacement { BeforeCv, WithinFold };

std::string_view to_string(BalanceMethod m);
std::string_view to_string(BalancePlacement p);

/// Every setting of a full run. Sub-config `seed` fields are ignored inside
/// the pipeline: each randomized step draws mix_seed(master_seed, tag, unit).
struct PipelineConfig {
  std::string input;
  std::string output_dir;
  std::uint64_t master_seed = 0;
  BalanceMethod balance = BalanceMethod::Smote;
  BalancePlacement placement = BalancePlacement::BeforeCv;
  SmoteConfig smote;
  bool select_features = true;
  GaConfig ga;
  TrainConfig train;
  std::size_t k_folds = 10;
  unsigned threads = 1;
  SynthConfig synth;

  /// Every violated field; `universe_size` 0 skips the subset-size check.
  std::vector<std::string> violations(std::size_t universe_size = 0) const;
};

nlohmann::json to_json(const PipelineConfig& cfg);
/// Overlays the keys present in `j` onto `base`. Unknown keys and wrongly
/// typed values are collected and thrown together as one Config error.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});

LabeledDataset balance(const LabeledDataset& data, BalanceMethod method, const SmoteConfig& smote_cfg,
                       std::uint64_t seed);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  std::size_t test_size = 0;
  IndexList test_rows;  // rows of the cross-validated dataset
  FeatureSubset subset;
  double ga_fitness = 0.0;
  MetricsReport report;
  TrainingHistory history;
  MlpModel model;
  Standardizer standardizer;  // restricted to `subset`
};

struct CvResult {
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;

  /// The last fold, reported as the headline test partition.
  const FoldResult& final_fold() const { return folds.back(); }
};

/// Outer stratified k-fold. Per fold: optional within-fold balancing of the
/// training part, stratified train/validation split, standardizer fit on the
/// inner-train rows, GA selection on training rows only, early-stopped MLP,
/// and metrics on the untouched test rows.
CvResult cross_validate(const LabeledDataset& data, const PipelineConfig& cfg);

/// balance (if BeforeCv) then cross_validate().
CvResult run_pipeline(const LabeledDataset& raw, const PipelineConfig& cfg);

}  // namespace chdnet
