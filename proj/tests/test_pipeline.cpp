#include "chdnet/model_io.hpp"
#include "chdnet/pipeline.hpp"
#include "chdnet/report.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <sstream>

using namespace chdnet;

namespace {

PipelineConfig quick_config() {
  PipelineConfig cfg;
  cfg.master_seed = 5;
  cfg.balance = BalanceMethod::None;
  cfg.select_features = false;
  cfg.train.max_epochs = 15;
  return cfg;
}

}  // namespace

TEST_CASE("config json: defaults, overlay and collected errors") {
  PipelineConfig defaults;
  CHECK(defaults.ga.population_size == 150);
  CHECK(defaults.ga.generations == 250);
  CHECK(defaults.ga.subset_size == 50);
  CHECK(defaults.train.max_fail == 6);
  CHECK(defaults.train.gamma == 0.1);
  CHECK(defaults.k_folds == 10);

  auto j = to_json(defaults);
  CHECK(to_json(config_from_json(j)) == j);

  auto overlay = config_from_json(nlohmann::json::parse(R"({"ga": {"generations": 60}, "master_seed": 9,
      "balance": {"method": "replicate"}})"));
  CHECK(overlay.ga.generations == 60);
  CHECK(overlay.ga.population_size == 150);
  CHECK(overlay.master_seed == 9);
  CHECK(overlay.balance == BalanceMethod::Replicate);

  try {
    config_from_json(nlohmann::json::parse(
        R"({"k_folds": "ten", "bogus": 1, "ga": {"evaluator": "svm"}, "train": {"gamma": true}})"));
    FAIL("expected a config error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(msg.find("k_folds") != std::string::npos);
    CHECK(msg.find("bogus: unknown key") != std::string::npos);
    CHECK(msg.find("ga.evaluator") != std::string::npos);
    CHECK(msg.find("train.gamma") != std::string::npos);
  }

  // type errors and out-of-range values arrive in the same message
  try {
    config_from_json(nlohmann::json::parse(R"({"ga": {"evaluator": "svm"}, "train": {"gamma": 2.0}, "k_folds": 1})"));
    FAIL("expected a config error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("ga.evaluator") != std::string::npos);
    CHECK(msg.find("train.gamma must") != std::string::npos);
    CHECK(msg.find("k_folds must") != std::string::npos);
  }

  PipelineConfig bad;
  bad.k_folds = 1;
  bad.ga.subset_size = 100;
  bad.train.max_fail = 0;
  CHECK(bad.violations(10).size() == 3);
}

TEST_CASE("cross_validate: 690 balanced samples, k = 10") {
  auto p = fixture::planted_gaussian(345, 8, 3, 1.5, 3);
  auto cfg = quick_config();
  auto r = cross_validate(p.data, cfg);
  REQUIRE(r.folds.size() == 10);
  double sum = 0.0;
  for (const auto& f : r.folds) {
    CHECK(f.test_size == 69);
    CHECK(f.report.confusion.total() == 69);
    sum += f.report.accuracy;
  }
  CHECK(r.mean_accuracy == doctest::Approx(sum / 10.0).epsilon(1e-15));
  CHECK(r.final_fold().fold == 9);
  CHECK(r.mean_accuracy > 0.7);
}

TEST_CASE("cross_validate: minimal k = 2 on four samples") {
  Matrix v(4, 2);
  v << 0, 0, 3, 3, 0.2, 0.1, 3.1, 2.9;
  LabeledDataset d(v, {Label::Case, Label::Control, Label::Case, Label::Control}, {"a", "b"}, {"1", "2", "3", "4"});
  auto cfg = quick_config();
  cfg.k_folds = 2;
  auto r = cross_validate(d, cfg);
  REQUIRE(r.folds.size() == 2);
  for (const auto& f : r.folds) {
    CHECK(f.train_size == 2);
    CHECK(f.test_size == 2);
  }
}

TEST_CASE("run_pipeline: deterministic across thread counts, GA and SMOTE included") {
  auto p = fixture::planted_gaussian(40, 30, 4, 1.5, 4);
  // make it imbalanced: drop half the cases
  IndexList keep;
  for (std::size_t i = 0; i < p.data.samples(); ++i)
    if (p.data.labels()[i] == Label::Control || i % 4 == 0) keep.push_back(i);
  auto data = p.data.select_rows(keep);
  PipelineConfig cfg;
  cfg.master_seed = 17;
  cfg.k_folds = 3;
  cfg.ga.population_size = 10;
  cfg.ga.generations = 5;
  cfg.ga.subset_size = 5;
  cfg.train.max_epochs = 20;
  auto a = run_pipeline(data, cfg);
  cfg.threads = 3;
  auto b = run_pipeline(data, cfg);
  const auto prov = nlohmann::json{{"test", true}};
  auto balanced = balance(data, cfg.balance, cfg.smote, mix_seed(cfg.master_seed, "balance"));
  CHECK(balanced.class_counts().cases == balanced.class_counts().controls);
  CHECK(dump_report(cv_report(a, balanced, prov)) == dump_report(cv_report(b, balanced, prov)));

  cfg.placement = BalancePlacement::WithinFold;
  cfg.threads = 1;
  auto w = run_pipeline(data, cfg);
  CHECK(w.folds.size() == 3);
  std::size_t tested = 0;
  for (const auto& f : w.folds) tested += f.test_size;
  CHECK(tested == data.samples());
}

TEST_CASE("cv report carries the headline fields") {
  auto p = fixture::planted_gaussian(30, 6, 2, 2.0, 6);
  auto cfg = quick_config();
  cfg.k_folds = 3;
  auto r = cross_validate(p.data, cfg);
  auto j = cv_report(r, p.data, to_json(cfg));
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j.contains("mean_cv_accuracy"));
  CHECK(j["fold_accuracies"].size() == 3);
  const auto& m = j["final_fold"]["metrics"];
  for (const char* key : {"accuracy", "mcc", "kappa", "auc_macro", "auc_micro", "per_class", "macro", "confusion_matrix"})
    CHECK(m.contains(key));
  CHECK(m["per_class"]["case"].contains("sensitivity"));
  CHECK(j["provenance"]["master_seed"] == 5);
}

TEST_CASE("model container round trip is exact") {
  auto p = fixture::planted_gaussian(20, 7, 2, 2.0, 7);
  FeatureSubset subset({1, 4, 6}, 7);
  auto x = take_cols(p.data.values(), subset.indices());
  ModelBundle b{init_model({3, 60, 60, 60, 2}, 3), fit_standardizer(x), subset, {"f1", "f4", "f6"},
                R"({"master_seed":3})"};
  std::stringstream io;
  write_model(io, b);
  auto back = read_model(io);
  CHECK(back.model.parameters() == b.model.parameters());
  CHECK(back.model.layer_sizes() == b.model.layer_sizes());
  CHECK(back.standardizer.mean == b.standardizer.mean);
  CHECK(back.standardizer.stddev == b.standardizer.stddev);
  CHECK(back.subset == b.subset);
  CHECK(back.feature_ids == b.feature_ids);
  CHECK(back.provenance == b.provenance);
  CHECK(bundle_inputs(back, p.data) == b.standardizer.apply(x));

  std::stringstream again;
  write_model(again, back);
  CHECK(again.str() == io.str());

  std::istringstream wrong("CHDNET-MLP\nversion 99\n");
  CHECK_THROWS_AS(read_model(wrong), Error);
  std::istringstream junk("hello\n");
  CHECK_THROWS_AS(read_model(junk), Error);
}
