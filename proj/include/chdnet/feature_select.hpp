#pragma once

#include "chdnet/dataset.hpp"

#include <iosfwd>
#include <string>

namespace chdnet {

enum class Evaluator { Lda, NaiveBayes, MeanOfBoth };

std::string_view to_string(Evaluator e);
Evaluator parse_evaluator(std::string_view token);

struct GaConfig {
  std::size_t population_size = 150;
  std::size_t generations = 250;
  std::size_t subset_size = 50;
  double crossover_rate = 0.9;
  double mutation_rate = 0.02;
  std::size_t tournament_size = 3;
  std::size_t elite_count = 2;
  std::size_t fitness_folds = 3;
  Evaluator evaluator = Evaluator::MeanOfBoth;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  /// Every violated constraint, one message each; empty when valid.
  std::vector<std::string> violations(std::size_t universe_size) const;
};

struct GaGeneration {
  double best_fitness = 0.0;  // best ever, up to and including this generation
  double mean_fitness = 0.0;  // over this generation's population
  FeatureSubset best;
};

struct GaHistory {
  std::vector<GaGeneration> generations;
  std::size_t evaluations = 0;  // distinct chromosomes scored
};

struct GaResult {
  FeatureSubset subset;
  double fitness = 0.0;
  GaHistory history;
};

/// Mean stratified `fitness_folds`-fold CV accuracy of the configured
/// evaluator on the subset's columns. Folds depend only on cfg.seed, so the
/// score is a pure function of the subset.
double fitness(const FeatureSubset& subset, const LabeledDataset& data, const GaConfig& cfg);

/// Shared genes go to both children; the remaining genes of both parents are
/// shuffled and split evenly between the two children.
std::pair<FeatureSubset, FeatureSubset> crossover(const FeatureSubset& a, const FeatureSubset& b, std::uint64_t seed);

/// Each gene is replaced with probability `rate` by a uniform draw from the
/// indices in neither the input subset nor the partially mutated one.
FeatureSubset mutate(const FeatureSubset& subset, std::size_t universe_size, double rate, std::uint64_t seed);

/// Generational GA with elitism and tournament selection; returns the
/// best-ever chromosome. `data` is expected to be standardized.
GaResult ga_select(const LabeledDataset& data, const GaConfig& cfg);

/// `rank,feature_index,feature_id`, rank 1-based in index order.
void write_subset_csv(std::ostream& out, const FeatureSubset& subset, const std::vector<std::string>& feature_ids);
FeatureSubset read_subset_csv(std::istream& in, std::size_t universe_size);

/// `generation,best_fitness,mean_fitness`
void write_ga_history_csv(std::ostream& out, const GaHistory& history);

}  // namespace chdnet
