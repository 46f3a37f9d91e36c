#include "chdnet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace chdnet {

std::string_view to_string(BalanceMethod m) {
  switch (m) {
    case BalanceMethod::Smote: return "smote";
    case BalanceMethod::Replicate: return "replicate";
    case BalanceMethod::None: return "none";
  }
  return "none";
}

std::string_view to_string(BalancePlacement p) {
  return p == BalancePlacement::BeforeCv ? "before_cv" : "within_fold";
}

std::vector<std::string> PipelineConfig::violations(std::size_t universe_size) const {
  std::vector<std::string> v;
  if (k_folds < 2) v.emplace_back("k_folds must be >= 2");
  if (threads < 1) v.emplace_back("threads must be >= 1");
  if (smote.k_neighbors < 1) v.emplace_back("smote.k_neighbors must be >= 1");
  if (select_features)
    for (auto& s : ga.violations(universe_size)) v.push_back(std::move(s));
  for (auto& s : train.violations()) v.push_back(std::move(s));
  return v;
}

nlohmann::json to_json(const PipelineConfig& c) {
  using nlohmann::json;
  json smote = {{"k_neighbors", c.smote.k_neighbors},
                {"standardize_distances", c.smote.standardize_distances},
                {"target_minority_count", nullptr}};
  if (c.smote.target_minority_count) smote["target_minority_count"] = *c.smote.target_minority_count;
  return json{
      {"input", c.input},
      {"output_dir", c.output_dir},
      {"master_seed", c.master_seed},
      {"threads", c.threads},
      {"k_folds", c.k_folds},
      {"balance", {{"method", to_string(c.balance)}, {"placement", to_string(c.placement)}}},
      {"smote", smote},
      {"select_features", c.select_features},
      {"ga",
       {{"population_size", c.ga.population_size},
        {"generations", c.ga.generations},
        {"subset_size", c.ga.subset_size},
        {"crossover_rate", c.ga.crossover_rate},
        {"mutation_rate", c.ga.mutation_rate},
        {"tournament_size", c.ga.tournament_size},
        {"elite_count", c.ga.elite_count},
        {"fitness_folds", c.ga.fitness_folds},
        {"evaluator", to_string(c.ga.evaluator)}}},
      {"train",
       {{"max_epochs", c.train.max_epochs},
        {"max_fail", c.train.max_fail},
        {"gamma", c.train.gamma},
        {"sigma", c.train.scg.sigma},
        {"lambda", c.train.scg.lambda},
        {"validation_fraction", c.train.validation_fraction},
        {"gradient_tolerance", c.train.gradient_tolerance}}},
      {"synth",
       {{"n_cases", c.synth.n_cases},
        {"n_controls", c.synth.n_controls},
        {"n_features", c.synth.n_features},
        {"n_informative", c.synth.n_informative},
        {"effect_size", c.synth.effect_size},
        {"median_intensity", c.synth.median_intensity},
        {"log_median_spread", c.synth.log_median_spread},
        {"log_sigma", c.synth.log_sigma}}},
  };
}

namespace {

using nlohmann::json;

class Reader {
 public:
  std::vector<std::string> errors;

  template <typename T>
  void field(const json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
      const auto& v = obj.at(key);
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("expected boolean");
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned()) throw std::invalid_argument("expected non-negative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("expected number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("expected string");
      }
      out = v.get<T>();
    } catch (const std::exception& e) {
      errors.push_back(path + key + ": " + e.what());
    }
  }

  template <typename Enum>
  void choice(const json& obj, const std::string& path, const char* key, Enum& out,
              const std::map<std::string, Enum>& options) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (v.is_string()) {
      if (auto it = options.find(v.get<std::string>()); it != options.end()) {
        out = it->second;
        return;
      }
    }
    std::string allowed;
    for (const auto& [name, _] : options) allowed += (allowed.empty() ? "" : "|") + name;
    errors.push_back(path + key + ": expected one of " + allowed);
  }

  void known(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) {
      errors.push_back(path + ": expected object");
      return;
    }
    for (const auto& [k, _] : obj.items()) {
      bool ok = false;
      for (const char* key : keys) ok = ok || k == key;
      if (!ok) errors.push_back(path + k + ": unknown key");
    }
  }

  const json& section(const json& obj, const char* key) {
    static const json empty = json::object();
    if (!obj.contains(key)) return empty;
    if (!obj.at(key).is_object()) {
      errors.push_back(std::string(key) + ": expected object");
      return empty;
    }
    return obj.at(key);
  }
};

}  // namespace

PipelineConfig config_from_json(const json& j, PipelineConfig c) {
  Reader r;
  r.known(j, "", {"input", "output_dir", "master_seed", "threads", "k_folds", "balance", "smote", "select_features",
                  "ga", "train", "synth"});
  r.field(j, "", "input", c.input);
  r.field(j, "", "output_dir", c.output_dir);
  r.field(j, "", "master_seed", c.master_seed);
  r.field(j, "", "threads", c.threads);
  r.field(j, "", "k_folds", c.k_folds);
  r.field(j, "", "select_features", c.select_features);

  const auto& bal = r.section(j, "balance");
  r.known(bal, "balance.", {"method", "placement"});
  r.choice(bal, "balance.", "method", c.balance,
           {{"smote", BalanceMethod::Smote}, {"replicate", BalanceMethod::Replicate}, {"none", BalanceMethod::None}});
  r.choice(bal, "balance.", "placement", c.placement,
           {{"before_cv", BalancePlacement::BeforeCv}, {"within_fold", BalancePlacement::WithinFold}});

  const auto& sm = r.section(j, "smote");
  r.known(sm, "smote.", {"k_neighbors", "standardize_distances", "target_minority_count"});
  r.field(sm, "smote.", "k_neighbors", c.smote.k_neighbors);
  r.field(sm, "smote.", "standardize_distances", c.smote.standardize_distances);
  if (sm.contains("target_minority_count")) {
    if (sm["target_minority_count"].is_null())
      c.smote.target_minority_count.reset();
    else {
      std::size_t t = 0;
      r.field(sm, "smote.", "target_minority_count", t);
      c.smote.target_minority_count = t;
    }
  }

  const auto& ga = r.section(j, "ga");
  r.known(ga, "ga.", {"population_size", "generations", "subset_size", "crossover_rate", "mutation_rate",
                      "tournament_size", "elite_count", "fitness_folds", "evaluator"});
  r.field(ga, "ga.", "population_size", c.ga.population_size);
  r.field(ga, "ga.", "generations", c.ga.generations);
  r.field(ga, "ga.", "subset_size", c.ga.subset_size);
  r.field(ga, "ga.", "crossover_rate", c.ga.crossover_rate);
  r.field(ga, "ga.", "mutation_rate", c.ga.mutation_rate);
  r.field(ga, "ga.", "tournament_size", c.ga.tournament_size);
  r.field(ga, "ga.", "elite_count", c.ga.elite_count);
  r.field(ga, "ga.", "fitness_folds", c.ga.fitness_folds);
  r.choice(ga, "ga.", "evaluator", c.ga.evaluator,
           {{"lda", Evaluator::Lda}, {"nb", Evaluator::NaiveBayes}, {"mean_of_both", Evaluator::MeanOfBoth}});

  const auto& tr = r.section(j, "train");
  r.known(tr, "train.", {"max_epochs", "max_fail", "gamma", "sigma", "lambda", "validation_fraction",
                         "gradient_tolerance"});
  r.field(tr, "train.", "max_epochs", c.train.max_epochs);
  r.field(tr, "train.", "max_fail", c.train.max_fail);
  r.field(tr, "train.", "gamma", c.train.gamma);
  r.field(tr, "train.", "sigma", c.train.scg.sigma);
  r.field(tr, "train.", "lambda", c.train.scg.lambda);
  r.field(tr, "train.", "validation_fraction", c.train.validation_fraction);
  r.field(tr, "train.", "gradient_tolerance", c.train.gradient_tolerance);

  const auto& sy = r.section(j, "synth");
  r.known(sy, "synth.", {"n_cases", "n_controls", "n_features", "n_informative", "effect_size", "median_intensity",
                         "log_median_spread", "log_sigma"});
  r.field(sy, "synth.", "n_cases", c.synth.n_cases);
  r.field(sy, "synth.", "n_controls", c.synth.n_controls);
  r.field(sy, "synth.", "n_features", c.synth.n_features);
  r.field(sy, "synth.", "n_informative", c.synth.n_informative);
  r.field(sy, "synth.", "effect_size", c.synth.effect_size);
  r.field(sy, "synth.", "median_intensity", c.synth.median_intensity);
  r.field(sy, "synth.", "log_median_spread", c.synth.log_median_spread);
  r.field(sy, "synth.", "log_sigma", c.synth.log_sigma);

  // range checks too, so one pass reports type and value problems together
  for (auto& v : c.violations()) r.errors.push_back(std::move(v));
  for (auto& v : c.synth.violations()) r.errors.push_back(std::move(v));
  if (!r.errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : r.errors) msg += "\n  " + e;
    throw Error(ErrorKind::Config, msg);
  }
  return c;
}

LabeledDataset balance(const LabeledDataset& data, BalanceMethod method, const SmoteConfig& smote_cfg,
                       std::uint64_t seed) {
  switch (method) {
    case BalanceMethod::Smote: {
      auto cfg = smote_cfg;
      cfg.seed = seed;
      return smote(data, cfg);
    }
    case BalanceMethod::Replicate: return replicate_oversample(data, seed);
    case BalanceMethod::None: return data;
  }
  return data;
}

namespace {

FoldResult run_fold(const LabeledDataset& data, const FoldPlan& plan, std::size_t f, const PipelineConfig& cfg,
                    unsigned inner_threads) {
  const std::uint64_t seed = cfg.master_seed;
  FoldResult out;
  out.fold = f;
  const auto test_rows = plan.test_indices(f);
  LabeledDataset outer_train = data.select_rows(plan.train_indices(f));
  const LabeledDataset test = data.select_rows(test_rows);

  LabeledDataset inner_train = outer_train;
  LabeledDataset validation = outer_train;
  const auto counts = outer_train.class_counts();
  const bool held_out = std::min(counts.cases, counts.controls) >= 2;
  if (held_out) {
    const auto split = stratified_split(outer_train.labels(), cfg.train.validation_fraction,
                                        mix_seed(seed, "inner-split", f));
    inner_train = outer_train.select_rows(split.train);
    validation = outer_train.select_rows(split.holdout);
  }
  // else: too few rows to hold any out; early stopping then watches the training rows
  if (cfg.placement == BalancePlacement::WithinFold)
    inner_train = balance(inner_train, cfg.balance, cfg.smote, mix_seed(seed, "fold-balance", f));

  const Standardizer full_std = fit_standardizer(inner_train);
  if (cfg.select_features) {
    GaConfig ga = cfg.ga;
    ga.seed = mix_seed(seed, "ga", f);
    ga.threads = inner_threads;
    // GA sees training rows only: inner-train plus validation, never the test fold
    const auto ga_data = apply_standardizer(full_std, held_out ? inner_train.append(validation) : inner_train);
    auto sel = ga_select(ga_data, ga);
    out.subset = std::move(sel.subset);
    out.ga_fitness = sel.fitness;
  } else {
    out.subset = FeatureSubset::all(data.features());
  }

  out.standardizer = full_std.restrict_to(out.subset);
  const auto& cols = out.subset.indices();
  const Matrix x_train = out.standardizer.apply(take_cols(inner_train.values(), cols));
  const Matrix x_val = out.standardizer.apply(take_cols(validation.values(), cols));
  const Matrix x_test = out.standardizer.apply(take_cols(test.values(), cols));

  TrainConfig tc = cfg.train;
  tc.seed = mix_seed(seed, "mlp-init", f);
  const auto start = init_model(default_layer_sizes(static_cast<Index>(cols.size())), tc.seed);
  auto trained = scg_train(start, x_train, inner_train.labels(), x_val, validation.labels(), tc);
  out.model = std::move(trained.model);
  out.history = std::move(trained.history);

  const Matrix proba = predict_proba(out.model, x_test);
  out.report = evaluate_predictions(proba, predict(out.model, x_test), test.labels());
  out.train_size = inner_train.samples();
  out.validation_size = validation.samples();
  out.test_size = test.samples();
  out.test_rows = test_rows;
  return out;
}

}  // namespace

CvResult cross_validate(const LabeledDataset& data, const PipelineConfig& cfg) {
  if (auto v = cfg.violations(data.features()); !v.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : v) msg += "\n  " + e;
    throw Error(ErrorKind::Config, msg);
  }
  const auto plan = stratified_kfold(data.labels(), cfg.k_folds, mix_seed(cfg.master_seed, "outer-folds"));
  CvResult result;
  result.folds.resize(cfg.k_folds);
  // folds share the workers; the GA inside each fold then runs serially
  parallel_for(cfg.k_folds, cfg.threads, [&](std::size_t f) { result.folds[f] = run_fold(data, plan, f, cfg, 1); });
  double sum = 0.0;
  for (const auto& f : result.folds) sum += f.report.accuracy;
  result.mean_accuracy = sum / double(result.folds.size());
  return result;
}

CvResult run_pipeline(const LabeledDataset& raw, const PipelineConfig& cfg) {
  if (cfg.placement == BalancePlacement::BeforeCv)
    return cross_validate(balance(raw, cfg.balance, cfg.smote, mix_seed(cfg.master_seed, "balance")), cfg);
  return cross_validate(raw, cfg);
}

}  // namespace chdnet
