#pragma once

#include "chdnet/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>

namespace chdnet {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const MetricsReport& report);
nlohmann::json to_json(const TrainingHistory& history);

/// Cross-validation report: mean accuracy, per-fold summaries and the
/// final fold's full metrics. `provenance` is embedded verbatim.
nlohmann::json cv_report(const CvResult& result, const LabeledDataset& data, const nlohmann::json& provenance);

/// Metrics of a stored model on one dataset.
nlohmann::json evaluation_report(const MetricsReport& report, const nlohmann::json& provenance);

/// Two-space indented dump with a trailing newline.
std::string dump_report(const nlohmann::json& j);

}  // namespace chdnet
