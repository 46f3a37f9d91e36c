#include "chdnet/feature_select.hpp"

#include "chdnet/linear.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace chdnet {

std::string_view to_string(Evaluator e) {
  switch (e) {
    case Evaluator::Lda: return "lda";
    case Evaluator::NaiveBayes: return "nb";
    case Evaluator::MeanOfBoth: return "mean_of_both";
  }
  return "mean_of_both";
}

Evaluator parse_evaluator(std::string_view token) {
  if (token == "lda") return Evaluator::Lda;
  if (token == "nb") return Evaluator::NaiveBayes;
  if (token == "mean_of_both") return Evaluator::MeanOfBoth;
  throw Error(ErrorKind::Config, "unknown evaluator '" + std::string(token) + "'");
}

std::vector<std::string> GaConfig::violations(std::size_t universe_size) const {
  std::vector<std::string> v;
  if (population_size < 2) v.emplace_back("ga.population_size must be >= 2");
  if (generations < 1) v.emplace_back("ga.generations must be >= 1");
  if (subset_size < 1) v.emplace_back("ga.subset_size must be >= 1");
  if (universe_size && subset_size > universe_size)
    v.emplace_back("ga.subset_size (" + std::to_string(subset_size) + ") exceeds feature count (" +
                   std::to_string(universe_size) + ")");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) v.emplace_back("ga.crossover_rate must lie in [0, 1]");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) v.emplace_back("ga.mutation_rate must lie in [0, 1]");
  if (tournament_size < 1) v.emplace_back("ga.tournament_size must be >= 1");
  if (elite_count > population_size) v.emplace_back("ga.elite_count must not exceed population_size");
  if (fitness_folds < 2) v.emplace_back("ga.fitness_folds must be >= 2");
  return v;
}

namespace {

class FitnessEvaluator {
 public:
  FitnessEvaluator(const LabeledDataset& data, const GaConfig& cfg)
      : data_(data),
        cfg_(cfg),
        plan_(stratified_kfold(data.labels(), cfg.fitness_folds, mix_seed(cfg.seed, "ga-fitness-folds"))) {
    for (std::size_t f = 0; f < plan_.k; ++f) {
      train_.push_back(plan_.train_indices(f));
      test_.push_back(plan_.test_indices(f));
      train_labels_.push_back(select(data.labels(), train_.back()));
      test_labels_.push_back(select(data.labels(), test_.back()));
    }
  }

  double operator()(const FeatureSubset& subset) const {
    if (subset.universe_size() != data_.features())
      throw Error(ErrorKind::Dimension, "subset universe does not match dataset");
    const Matrix cols = take_cols(data_.values(), subset.indices());
    double total = 0.0;
    for (std::size_t f = 0; f < plan_.k; ++f) {
      const Matrix xtr = take_rows(cols, train_[f]);
      const Matrix xte = take_rows(cols, test_[f]);
      double score = 0.0;
      switch (cfg_.evaluator) {
        case Evaluator::Lda:
          score = accuracy(test_labels_[f], lda_predict(lda_fit(xtr, train_labels_[f]), xte).labels);
          break;
        case Evaluator::NaiveBayes:
          score = accuracy(test_labels_[f], nb_predict(nb_fit(xtr, train_labels_[f]), xte).labels);
          break;
        case Evaluator::MeanOfBoth:
          score = 0.5 * (accuracy(test_labels_[f], lda_predict(lda_fit(xtr, train_labels_[f]), xte).labels) +
                         accuracy(test_labels_[f], nb_predict(nb_fit(xtr, train_labels_[f]), xte).labels));
          break;
      }
      total += score;
    }
    return total / double(plan_.k);
  }

 private:
  static Labels select(const Labels& all, const IndexList& rows) {
    Labels out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(all[r]);
    return out;
  }

  const LabeledDataset& data_;
  const GaConfig& cfg_;
  FoldPlan plan_;
  std::vector<IndexList> train_, test_;
  std::vector<Labels> train_labels_, test_labels_;
};

FeatureSubset random_subset(std::size_t universe, std::size_t size, std::mt19937_64& rng) {
  IndexList all(universe);
  std::iota(all.begin(), all.end(), std::size_t{0});
  IndexList picked;
  picked.reserve(size);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), size, rng);
  return FeatureSubset(std::move(picked), universe);
}

}  // namespace

double fitness(const FeatureSubset& subset, const LabeledDataset& data, const GaConfig& cfg) {
  return FitnessEvaluator(data, cfg)(subset);
}

std::pair<FeatureSubset, FeatureSubset> crossover(const FeatureSubset& a, const FeatureSubset& b, std::uint64_t seed) {
  if (a.size() != b.size() || a.universe_size() != b.universe_size())
    throw Error(ErrorKind::InvalidInput, "crossover parents differ in shape");
  IndexList shared, pool;
  std::set_intersection(a.indices().begin(), a.indices().end(), b.indices().begin(), b.indices().end(),
                        std::back_inserter(shared));
  std::set_symmetric_difference(a.indices().begin(), a.indices().end(), b.indices().begin(), b.indices().end(),
                                std::back_inserter(pool));
  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  const auto half = static_cast<std::ptrdiff_t>(pool.size() / 2);
  IndexList ca = shared, cb = shared;
  ca.insert(ca.end(), pool.begin(), pool.begin() + half);
  cb.insert(cb.end(), pool.begin() + half, pool.end());
  return {FeatureSubset(std::move(ca), a.universe_size()), FeatureSubset(std::move(cb), a.universe_size())};
}

FeatureSubset mutate(const FeatureSubset& subset, std::size_t universe_size, double rate, std::uint64_t seed) {
  if (rate <= 0.0) return subset;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(std::min(rate, 1.0));
  IndexList genes = subset.indices();
  std::vector<bool> taken(universe_size, false);
  for (auto g : genes) taken[g] = true;
  std::size_t free = universe_size - genes.size();
  std::uniform_int_distribution<std::size_t> any(0, universe_size - 1);
  for (auto& g : genes) {
    if (!flip(rng) || free == 0) continue;
    std::size_t pick;
    if (free * 4 >= universe_size) {
      do pick = any(rng);
      while (taken[pick]);
    } else {
      IndexList open;
      for (std::size_t i = 0; i < universe_size; ++i)
        if (!taken[i]) open.push_back(i);
      pick = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
    }
    taken[pick] = true;
    --free;
    g = pick;
  }
  return FeatureSubset(std::move(genes), universe_size);
}

GaResult ga_select(const LabeledDataset& data, const GaConfig& cfg) {
  const std::size_t universe = data.features();
  if (cfg.subset_size > universe)
    throw Error(ErrorKind::Config, "subset_size " + std::to_string(cfg.subset_size) + " exceeds feature count " +
                                       std::to_string(universe));
  if (auto v = cfg.violations(universe); !v.empty()) throw Error(ErrorKind::Config, v.front());

  const FitnessEvaluator evaluate(data, cfg);
  std::map<IndexList, double> cache;
  GaResult result;

  auto score_population = [&](const std::vector<FeatureSubset>& pop) {
    std::vector<const FeatureSubset*> pending;
    std::map<IndexList, bool> queued;
    for (const auto& c : pop)
      if (!cache.count(c.indices()) && queued.emplace(c.indices(), true).second) pending.push_back(&c);
    std::vector<double> scores(pending.size());
    parallel_for(pending.size(), cfg.threads, [&](std::size_t i) { scores[i] = evaluate(*pending[i]); });
    for (std::size_t i = 0; i < pending.size(); ++i) cache.emplace(pending[i]->indices(), scores[i]);
    result.history.evaluations += pending.size();
    std::vector<double> fit;
    fit.reserve(pop.size());
    for (const auto& c : pop) fit.push_back(cache.at(c.indices()));
    return fit;
  };

  auto record = [&](const std::vector<FeatureSubset>& pop, const std::vector<double>& fit) {
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (result.subset.size() == 0 || fit[i] > result.fitness) {
        result.fitness = fit[i];
        result.subset = pop[i];
      }
    }
    result.history.generations.push_back(
        {result.fitness, std::accumulate(fit.begin(), fit.end(), 0.0) / double(fit.size()), result.subset});
  };

  std::vector<FeatureSubset> population;
  {
    std::mt19937_64 rng(mix_seed(cfg.seed, "ga-init"));
    for (std::size_t i = 0; i < cfg.population_size; ++i)
      population.push_back(random_subset(universe, cfg.subset_size, rng));
  }
  auto fit = score_population(population);
  record(population, fit);
  if (cfg.subset_size == universe) return result;

  for (std::size_t g = 1; g < cfg.generations; ++g) {
    std::mt19937_64 rng(mix_seed(cfg.seed, "ga-generation", g));
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fit[a] > fit[b]; });

    std::vector<FeatureSubset> next;
    next.reserve(cfg.population_size);
    for (std::size_t e = 0; e < cfg.elite_count; ++e) next.push_back(population[order[e]]);

    std::uniform_int_distribution<std::size_t> any(0, population.size() - 1);
    auto tournament = [&]() -> const FeatureSubset& {
      std::size_t best = any(rng);
      for (std::size_t t = 1; t < cfg.tournament_size; ++t) {
        const auto challenger = any(rng);
        if (fit[challenger] > fit[best] || (fit[challenger] == fit[best] && challenger < best)) best = challenger;
      }
      return population[best];
    };
    std::bernoulli_distribution do_cross(cfg.crossover_rate);

    while (next.size() < cfg.population_size) {
      const auto& pa = tournament();
      const auto& pb = tournament();
      const std::uint64_t cross_seed = rng();
      const bool cross = do_cross(rng);
      auto [ca, cb] = cross ? crossover(pa, pb, cross_seed) : std::pair{pa, pb};
      next.push_back(mutate(ca, universe, cfg.mutation_rate, rng()));
      if (next.size() < cfg.population_size) next.push_back(mutate(cb, universe, cfg.mutation_rate, rng()));
    }
    population = std::move(next);
    fit = score_population(population);
    record(population, fit);
  }
  return result;
}

void write_subset_csv(std::ostream& out, const FeatureSubset& subset, const std::vector<std::string>& feature_ids) {
  out << "rank,feature_index,feature_id\n";
  for (std::size_t r = 0; r < subset.size(); ++r) {
    const auto idx = subset.indices()[r];
    out << r + 1 << ',' << idx << ',' << (idx < feature_ids.size() ? feature_ids[idx] : std::string()) << '\n';
  }
}

FeatureSubset read_subset_csv(std::istream& in, std::size_t universe_size) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "subset file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "rank,feature_index,feature_id") throw Error(ErrorKind::Parse, "subset file: unexpected header");
  IndexList idx;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string rank, index;
    if (!std::getline(row, rank, ',') || !std::getline(row, index, ','))
      throw Error(ErrorKind::Parse, "subset file line " + std::to_string(line_no) + ": malformed row");
    try {
      idx.push_back(std::stoul(index));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "subset file line " + std::to_string(line_no) + ": bad feature_index");
    }
  }
  return FeatureSubset(std::move(idx), universe_size);
}

void write_ga_history_csv(std::ostream& out, const GaHistory& history) {
  out << "generation,best_fitness,mean_fitness\n";
  for (std::size_t g = 0; g < history.generations.size(); ++g)
    out << g << ',' << format_double(history.generations[g].best_fitness) << ','
        << format_double(history.generations[g].mean_fitness) << '\n';
}

}  // namespace chdnet
