// chdnet: stage-by-stage driver for the classification pipeline.
//
//   chdnet gen       synthetic cohort            -> dataset.csv, planted.csv
//   chdnet balance   oversample the minority     -> balanced.csv
//   chdnet select    GA feature selection        -> subset.csv, ga_history.csv
//   chdnet train     early-stopped MLP           -> model.chdmlp, learning_curve.csv
//   chdnet evaluate  score a stored model        -> report.json, roc_case.csv, roc_control.csv
//   chdnet run-all   balance + k-fold CV chain   -> report.json and the final fold's artifacts
//
// Every stage also writes <stage>.manifest.json with the resolved
// configuration. Failures print one JSON error record on stderr.

#include "chdnet/model_io.hpp"
#include "chdnet/pipeline.hpp"
#include "chdnet/report.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chdnet;

namespace {

constexpr const char* kOutEnv = "CHDNET_OUT_DIR";

struct Common {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool force = false;
};

// Flags that override configuration values; unset ones leave the file/defaults alone.
struct Overrides {
  std::optional<std::string> input;
  std::optional<std::string> method, placement, evaluator;
  std::optional<std::size_t> k_neighbors, target;
  std::optional<std::size_t> population, generations, subset_size, tournament, elites, fitness_folds;
  std::optional<double> crossover_rate, mutation_rate;
  std::optional<std::size_t> max_epochs, max_fail, k_folds;
  std::optional<double> gamma, validation_fraction;
  std::optional<std::size_t> cases, controls, features, informative;
  std::optional<double> effect_size, log_sigma;
  bool no_select = false;
};

template <typename T>
void put(json& j, const char* section, const char* key, const std::optional<T>& v) {
  if (v) j[section][key] = *v;
}

PipelineConfig resolve(const Common& c, const Overrides& o) {
  PipelineConfig cfg;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config file " + c.config_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::Parse, "config file " + c.config_path + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::Config, "config file must hold a JSON object");
    cfg = config_from_json(j);
  }
  // flags go through the same reader so bad enum values are reported alike
  json f = json::object();
  if (o.input) f["input"] = *o.input;
  if (c.out) f["output_dir"] = *c.out;
  if (c.seed) f["master_seed"] = *c.seed;
  if (c.threads) f["threads"] = *c.threads;
  if (o.k_folds) f["k_folds"] = *o.k_folds;
  if (o.no_select) f["select_features"] = false;
  put(f, "balance", "method", o.method);
  put(f, "balance", "placement", o.placement);
  put(f, "smote", "k_neighbors", o.k_neighbors);
  put(f, "smote", "target_minority_count", o.target);
  put(f, "ga", "population_size", o.population);
  put(f, "ga", "generations", o.generations);
  put(f, "ga", "subset_size", o.subset_size);
  put(f, "ga", "crossover_rate", o.crossover_rate);
  put(f, "ga", "mutation_rate", o.mutation_rate);
  put(f, "ga", "tournament_size", o.tournament);
  put(f, "ga", "elite_count", o.elites);
  put(f, "ga", "fitness_folds", o.fitness_folds);
  put(f, "ga", "evaluator", o.evaluator);
  put(f, "train", "max_epochs", o.max_epochs);
  put(f, "train", "max_fail", o.max_fail);
  put(f, "train", "gamma", o.gamma);
  put(f, "train", "validation_fraction", o.validation_fraction);
  put(f, "synth", "n_cases", o.cases);
  put(f, "synth", "n_controls", o.controls);
  put(f, "synth", "n_features", o.features);
  put(f, "synth", "n_informative", o.informative);
  put(f, "synth", "effect_size", o.effect_size);
  put(f, "synth", "log_sigma", o.log_sigma);
  cfg = config_from_json(f, cfg);

  if (cfg.output_dir.empty()) {
    const char* env = std::getenv(kOutEnv);
    cfg.output_dir = env && *env ? env : ".";
  }
  return cfg;
}

void require_valid(const std::vector<std::string>& violations) {
  if (violations.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& v : violations) msg += "\n  " + v;
  throw Error(ErrorKind::Config, msg);
}

/// Output files of one stage; refuses to clobber unless forced.
class Outputs {
 public:
  Outputs(const PipelineConfig& cfg, bool force) : dir_(cfg.output_dir), force_(force) {}

  void claim(std::initializer_list<const char*> names) {
    for (const char* n : names) {
      const fs::path p = dir_ / n;
      if (fs::exists(p) && !force_)
        throw Error(ErrorKind::Io, p.string() + " already exists (use --force to overwrite)");
    }
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  std::ofstream open(const char* name) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
    written_.push_back(name);
    return out;
  }

  fs::path path(const char* name) {
    written_.push_back(name);
    return dir_ / name;
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path dir_;
  bool force_;
  std::vector<std::string> written_;
};

void close_checked(std::ofstream& out, const std::string& what) {
  out.close();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + what);
}

/// Resolved settings that determine a stage's results. Scheduling and the
/// output location are left out so artifacts compare equal across them.
json provenance(const std::string& command, const PipelineConfig& cfg, json inputs) {
  json c = to_json(cfg);
  c.erase("threads");
  c.erase("output_dir");
  c.erase("input");
  return {{"tool", "chdnet"},
          {"command", command},
          {"schema_version", kReportSchemaVersion},
          {"master_seed", cfg.master_seed},
          {"inputs", std::move(inputs)},
          {"config", std::move(c)}};
}

void write_manifest(Outputs& out, const std::string& command, const json& prov) {
  const std::string name = command + ".manifest.json";
  json m = prov;
  m["outputs"] = out.written();
  auto f = out.open(name.c_str());
  f << dump_report(m);
  close_checked(f, name);
}

LabeledDataset load_input(const PipelineConfig& cfg) {
  if (cfg.input.empty()) throw Error(ErrorKind::Config, "an input dataset is required (--input)");
  return load_csv(cfg.input);
}

template <typename Fn>
void write_text(Outputs& out, const char* name, Fn&& body) {
  auto f = out.open(name);
  body(f);
  close_checked(f, name);
}

// ---------------------------------------------------------------------------

SynthResult generate_cohort(const PipelineConfig& cfg) {
  SynthConfig s = cfg.synth;
  s.seed = mix_seed(cfg.master_seed, "synth");
  require_valid(s.violations());
  return generate(s);
}

void write_cohort(Outputs& out, const SynthResult& cohort) {
  write_text(out, "dataset.csv", [&](std::ostream& f) { write_csv(f, cohort.data); });
  write_text(out, "planted.csv", [&](std::ostream& f) { write_planted_csv(f, cohort); });
}

void cmd_gen(const PipelineConfig& cfg, Outputs& out) {
  out.claim({"dataset.csv", "planted.csv", "gen.manifest.json"});
  write_cohort(out, generate_cohort(cfg));
  write_manifest(out, "gen", provenance("gen", cfg, json::object()));
}

void cmd_balance(const PipelineConfig& cfg, Outputs& out) {
  require_valid(cfg.violations());
  const auto data = load_input(cfg);
  out.claim({"balanced.csv", "balance.manifest.json"});
  const auto balanced = balance(data, cfg.balance, cfg.smote, mix_seed(cfg.master_seed, "balance"));
  write_text(out, "balanced.csv", [&](std::ostream& f) { write_csv(f, balanced); });
  write_manifest(out, "balance", provenance("balance", cfg, {{"dataset", cfg.input}}));
}

void cmd_select(const PipelineConfig& cfg, Outputs& out) {
  const auto data = load_input(cfg);
  require_valid(cfg.ga.violations(data.features()));
  out.claim({"subset.csv", "ga_history.csv", "select.manifest.json"});
  GaConfig ga = cfg.ga;
  ga.seed = mix_seed(cfg.master_seed, "select");
  ga.threads = cfg.threads;
  const auto result = ga_select(apply_standardizer(fit_standardizer(data), data), ga);
  write_text(out, "subset.csv", [&](std::ostream& f) { write_subset_csv(f, result.subset, data.feature_ids()); });
  write_text(out, "ga_history.csv", [&](std::ostream& f) { write_ga_history_csv(f, result.history); });
  auto prov = provenance("select", cfg, {{"dataset", cfg.input}});
  prov["fitness"] = result.fitness;
  write_manifest(out, "select", prov);
}

void cmd_train(const PipelineConfig& cfg, const std::string& subset_path, Outputs& out) {
  require_valid(cfg.train.violations());
  const auto data = load_input(cfg);
  FeatureSubset subset = FeatureSubset::all(data.features());
  if (!subset_path.empty()) {
    std::ifstream in(subset_path);
    if (!in) throw Error(ErrorKind::Io, "cannot open subset file " + subset_path);
    subset = read_subset_csv(in, data.features());
  }
  out.claim({"model.chdmlp", "learning_curve.csv", "train.manifest.json"});

  const auto split = stratified_split(data.labels(), cfg.train.validation_fraction,
                                      mix_seed(cfg.master_seed, "train-split"));
  const auto train = data.select_rows(split.train);
  const auto val = data.select_rows(split.holdout);
  const auto& cols = subset.indices();
  const Standardizer sd = fit_standardizer(train).restrict_to(subset);
  TrainConfig tc = cfg.train;
  tc.seed = mix_seed(cfg.master_seed, "mlp-init");
  const auto start = init_model(default_layer_sizes(static_cast<Index>(cols.size())), tc.seed);
  const auto result = scg_train(start, sd.apply(take_cols(train.values(), cols)), train.labels(),
                                sd.apply(take_cols(val.values(), cols)), val.labels(), tc);

  json inputs = {{"dataset", cfg.input}};
  if (!subset_path.empty()) inputs["subset"] = subset_path;
  const json prov = provenance("train", cfg, inputs);
  ModelBundle bundle{result.model, sd, subset, {}, prov.dump()};
  for (auto c : cols) bundle.feature_ids.push_back(data.feature_ids()[c]);
  save_model(out.path("model.chdmlp"), bundle);
  write_text(out, "learning_curve.csv", [&](std::ostream& f) { write_learning_curve_csv(f, result.history); });
  write_manifest(out, "train", prov);
}

json bundle_provenance(const ModelBundle& bundle) {
  try {
    return json::parse(bundle.provenance);
  } catch (const json::parse_error&) {
    return bundle.provenance;
  }
}

void write_metrics(Outputs& out, const MetricsReport& report, const json& prov) {
  write_text(out, "report.json", [&](std::ostream& f) { f << dump_report(evaluation_report(report, prov)); });
  write_text(out, "roc_case.csv", [&](std::ostream& f) { write_roc_csv(f, report.roc[0]); });
  write_text(out, "roc_control.csv", [&](std::ostream& f) { write_roc_csv(f, report.roc[1]); });
}

void cmd_evaluate(const PipelineConfig& cfg, const std::string& model_path, Outputs& out) {
  if (model_path.empty()) throw Error(ErrorKind::Config, "a model file is required (--model)");
  const auto bundle = load_model(model_path);
  const auto data = load_input(cfg);
  out.claim({"report.json", "roc_case.csv", "roc_control.csv"});
  const Matrix x = bundle_inputs(bundle, data);
  const auto report = evaluate_predictions(predict_proba(bundle.model, x), predict(bundle.model, x), data.labels());
  // the report carries the model's provenance only, so re-evaluating the
  // same model on the same rows reproduces it byte for byte
  write_metrics(out, report, bundle_provenance(bundle));
}

void cmd_run_all(const PipelineConfig& cfg, Outputs& out) {
  const bool generated = cfg.input.empty();
  out.claim({"report.json", "final_fold_report.json", "final_test.csv", "model.chdmlp", "learning_curve.csv",
             "subset.csv", "roc_case.csv", "roc_control.csv", "run-all.manifest.json"});
  if (generated) out.claim({"dataset.csv", "planted.csv"});

  LabeledDataset raw;
  if (generated) {
    const auto cohort = generate_cohort(cfg);
    write_cohort(out, cohort);
    raw = cohort.data;
  } else {
    raw = load_csv(cfg.input);
  }
  require_valid(cfg.violations(raw.features()));

  const LabeledDataset data = cfg.placement == BalancePlacement::BeforeCv
                                  ? balance(raw, cfg.balance, cfg.smote, mix_seed(cfg.master_seed, "balance"))
                                  : raw;
  const auto cv = cross_validate(data, cfg);
  const json prov = provenance("run-all", cfg, generated ? json{{"dataset", "generated"}} : json{{"dataset", cfg.input}});

  write_text(out, "report.json", [&](std::ostream& f) { f << dump_report(cv_report(cv, data, prov)); });

  const auto& last = cv.final_fold();
  ModelBundle bundle{last.model, last.standardizer, last.subset, {}, prov.dump()};
  for (auto c : last.subset.indices()) bundle.feature_ids.push_back(data.feature_ids()[c]);
  save_model(out.path("model.chdmlp"), bundle);
  write_text(out, "final_test.csv", [&](std::ostream& f) { write_csv(f, data.select_rows(last.test_rows)); });
  write_text(out, "final_fold_report.json",
             [&](std::ostream& f) { f << dump_report(evaluation_report(last.report, prov)); });
  write_text(out, "learning_curve.csv", [&](std::ostream& f) { write_learning_curve_csv(f, last.history); });
  write_text(out, "subset.csv", [&](std::ostream& f) { write_subset_csv(f, last.subset, data.feature_ids()); });
  write_text(out, "roc_case.csv", [&](std::ostream& f) { write_roc_csv(f, last.report.roc[0]); });
  write_text(out, "roc_control.csv", [&](std::ostream& f) { write_roc_csv(f, last.report.roc[1]); });
  write_manifest(out, "run-all", prov);
}

std::string kind_name(ErrorKind k) { return std::string(to_string(k)); }

int report_error(const std::string& command, const std::string& kind, const std::string& message, int code) {
  const json record = {{"error", {{"command", command}, {"kind", kind}, {"message", message}}}};
  std::cerr << record.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CHD proteomics classifier: balancing, GA feature selection, MLP training, evaluation"};
  app.require_subcommand(1);
  Common common;
  Overrides ov;
  std::string model_path, subset_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON configuration file; flags override its values");
    sub->add_option("--out", common.out, std::string("Output directory (default: $") + kOutEnv + " or .)");
    sub->add_option("--seed", common.seed, "Master seed");
    sub->add_option("--threads", common.threads, "Worker threads; results do not depend on it");
    sub->add_flag("--force", common.force, "Overwrite existing outputs");
  };
  auto add_synth = [&](CLI::App* sub) {
    sub->add_option("--cases", ov.cases, "Number of cases");
    sub->add_option("--controls", ov.controls, "Number of controls");
    sub->add_option("--features", ov.features, "Number of peptides");
    sub->add_option("--informative", ov.informative, "Number of planted peptides");
    sub->add_option("--effect-size", ov.effect_size, "Planted shift in log-space standard deviations");
    sub->add_option("--log-sigma", ov.log_sigma, "Within-peptide log-space standard deviation");
  };
  auto add_balance = [&](CLI::App* sub) {
    sub->add_option("--method", ov.method, "smote | replicate | none");
    sub->add_option("--k-neighbors", ov.k_neighbors, "SMOTE neighbours");
    sub->add_option("--target", ov.target, "Final minority count (default: majority count)");
  };
  auto add_ga = [&](CLI::App* sub) {
    sub->add_option("--population", ov.population, "GA population size");
    sub->add_option("--generations", ov.generations, "GA generations");
    sub->add_option("--subset-size", ov.subset_size, "Features per chromosome");
    sub->add_option("--crossover-rate", ov.crossover_rate, "Crossover probability");
    sub->add_option("--mutation-rate", ov.mutation_rate, "Per-gene mutation probability");
    sub->add_option("--tournament", ov.tournament, "Tournament size");
    sub->add_option("--elites", ov.elites, "Elite chromosomes carried over");
    sub->add_option("--fitness-folds", ov.fitness_folds, "CV folds inside the fitness");
    sub->add_option("--evaluator", ov.evaluator, "lda | nb | mean_of_both");
  };
  auto add_train = [&](CLI::App* sub) {
    sub->add_option("--max-epochs", ov.max_epochs, "Epoch limit");
    sub->add_option("--max-fail", ov.max_fail, "Epochs without validation improvement before stopping");
    sub->add_option("--gamma", ov.gamma, "Weight regularization ratio");
    sub->add_option("--validation-fraction", ov.validation_fraction, "Share of training rows held out");
  };

  auto* gen = app.add_subcommand("gen", "Generate a synthetic cohort with planted peptides");
  add_common(gen);
  add_synth(gen);

  auto* bal = app.add_subcommand("balance", "Oversample the minority class");
  add_common(bal);
  bal->add_option("--input", ov.input, "Dataset CSV");
  add_balance(bal);

  auto* sel = app.add_subcommand("select", "GA wrapper feature selection");
  add_common(sel);
  sel->add_option("--input", ov.input, "Dataset CSV");
  add_ga(sel);

  auto* tr = app.add_subcommand("train", "Train the MLP with early stopping");
  add_common(tr);
  tr->add_option("--input", ov.input, "Dataset CSV");
  tr->add_option("--subset", subset_path, "Subset CSV from `select` (default: all features)");
  add_train(tr);

  auto* ev = app.add_subcommand("evaluate", "Score a stored model on a dataset");
  add_common(ev);
  ev->add_option("--input", ov.input, "Dataset CSV");
  ev->add_option("--model", model_path, "Model file from `train` or `run-all`");

  auto* all = app.add_subcommand("run-all", "Balance, then stratified k-fold CV of selection + training");
  add_common(all);
  all->add_option("--input", ov.input, "Dataset CSV (default: generate a synthetic cohort)");
  all->add_option("--placement", ov.placement, "before_cv | within_fold");
  all->add_option("--k-folds", ov.k_folds, "Outer folds");
  all->add_flag("--no-select", ov.no_select, "Skip GA selection and train on all features");
  add_synth(all);
  add_balance(all);
  add_ga(all);
  add_train(all);

  std::string command = "chdnet";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    for (auto* s : app.get_subcommands()) command = s->get_name();
    return report_error(command, "usage", e.what(), 2);
  }

  CLI::App* chosen = app.get_subcommands().front();
  command = chosen->get_name();
  try {
    const PipelineConfig cfg = resolve(common, ov);
    Outputs out(cfg, common.force);
    if (chosen == gen) cmd_gen(cfg, out);
    else if (chosen == bal) cmd_balance(cfg, out);
    else if (chosen == sel) cmd_select(cfg, out);
    else if (chosen == tr) cmd_train(cfg, subset_path, out);
    else if (chosen == ev) cmd_evaluate(cfg, model_path, out);
    else cmd_run_all(cfg, out);
  } catch (const Error& e) {
    return report_error(command, kind_name(e.kind()), e.what(), 1);
  } catch (const std::exception& e) {
    return report_error(command, "internal", e.what(), 1);
  }
  return 0;
}
