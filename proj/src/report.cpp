#include "chdnet/report.hpp"

namespace chdnet {

using nlohmann::json;

namespace {

json class_json(const ClassMetrics& m, double auc_value) {
  return {{"precision", m.precision}, {"sensitivity", m.sensitivity}, {"specificity", m.specificity},
          {"f1", m.f1},               {"auc", auc_value},             {"degenerate", m.degenerate}};
}

}  // namespace

json to_json(const MetricsReport& r) {
  const auto& c = r.confusion.counts;
  return {
      {"confusion_matrix",
       {{"labels", {"case", "control"}},
        {"rows", "true"},
        {"columns", "predicted"},
        {"counts", {{c[0][0], c[0][1]}, {c[1][0], c[1][1]}}}}},
      {"samples", r.confusion.total()},
      {"accuracy", r.accuracy},
      {"per_class",
       {{"case", class_json(r.per_class[0], r.class_auc[0])},
        {"control", class_json(r.per_class[1], r.class_auc[1])}}},
      {"macro",
       {{"precision", r.macro_precision},
        {"sensitivity", r.macro_sensitivity},
        {"specificity", r.macro_specificity},
        {"f1", r.macro_f1}}},
      {"mcc", {{"value", r.mcc.value}, {"degenerate", r.mcc.degenerate}}},
      {"kappa", {{"value", r.kappa.value}, {"degenerate", r.kappa.degenerate}}},
      {"auc_macro", r.macro_auc},
      {"auc_micro", r.micro_auc},
  };
}

json to_json(const TrainingHistory& h) {
  return {{"epochs", h.epochs()},
          {"best_epoch", h.best_epoch},
          {"stop_reason", to_string(h.stop_reason)},
          {"best_val_loss", h.val_loss.at(h.best_epoch)},
          {"train_loss", h.train_loss},
          {"val_loss", h.val_loss},
          {"train_accuracy", h.train_accuracy},
          {"val_accuracy", h.val_accuracy}};
}

json cv_report(const CvResult& result, const LabeledDataset& data, const json& provenance) {
  json folds = json::array();
  json accuracies = json::array();
  for (const auto& f : result.folds) {
    json ids = json::array();
    for (auto idx : f.subset.indices()) ids.push_back(data.feature_ids()[idx]);
    accuracies.push_back(f.report.accuracy);
    folds.push_back({{"fold", f.fold},
                     {"train_size", f.train_size},
                     {"validation_size", f.validation_size},
                     {"test_size", f.test_size},
                     {"accuracy", f.report.accuracy},
                     {"auc_macro", f.report.macro_auc},
                     {"ga_fitness", f.ga_fitness},
                     {"selected_feature_indices", f.subset.indices()},
                     {"selected_feature_ids", ids},
                     {"training",
                      {{"epochs", f.history.epochs()},
                       {"best_epoch", f.history.best_epoch},
                       {"stop_reason", to_string(f.history.stop_reason)},
                       {"best_val_loss", f.history.val_loss.at(f.history.best_epoch)}}}});
  }
  const auto& last = result.final_fold();
  return {{"schema_version", kReportSchemaVersion},
          {"kind", "cross_validation"},
          {"provenance", provenance},
          {"samples", data.samples()},
          {"class_counts", {{"case", data.class_counts().cases}, {"control", data.class_counts().controls}}},
          {"k_folds", result.folds.size()},
          {"mean_cv_accuracy", result.mean_accuracy},
          {"fold_accuracies", accuracies},
          {"folds", folds},
          {"final_fold", {{"fold", last.fold}, {"metrics", to_json(last.report)}, {"training", to_json(last.history)}}}};
}

json evaluation_report(const MetricsReport& report, const json& provenance) {
  return {{"schema_version", kReportSchemaVersion},
          {"kind", "evaluation"},
          {"provenance", provenance},
          {"metrics", to_json(report)}};
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

}  // namespace chdnet
