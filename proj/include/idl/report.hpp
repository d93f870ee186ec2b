#pragma once

#include "idl/baselines.hpp"
#include "idl/experiments.hpp"
#include "idl/trainer.hpp"
#include "idl/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace idl {

nlohmann::json to_json(const GramSummary& summary);
GramSummary gram_summary_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DecorrelationReport& report);
DecorrelationReport decorrelation_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const IterationRecord& record, std::size_t iteration, bool include_timing);

/// One JSON object per line, one line per iteration.
std::string history_to_json_lines(const TrainHistory& history, bool include_timing = true);
/// Header plus one row per iteration; singular values as sigma_0, sigma_1, ...
std::string history_to_csv(const TrainHistory& history);

nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport experiment_report_from_json(const nlohmann::json& j);

enum class ReportFormat { Json, Csv };

/// JSON: a single file at `path`. CSV: `path` is a directory receiving one
/// file per table plus manifest.csv listing them.
void export_report(const ExperimentReport& report, const std::filesystem::path& path, ReportFormat format);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace idl
