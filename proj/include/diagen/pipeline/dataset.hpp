#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "diagen/pipeline/metrics.hpp"
#include "diagen/pipeline/run.hpp"

namespace diagen::pipeline {

nlohmann::ordered_json record_json(const DatasetRecord& record);
DatasetRecord record_from_json(const nlohmann::json& j);

/// Writes <dir>/dataset.jsonl, <dir>/svg/*.svg and <dir>/manifest.json.
/// Output depends only on its arguments. Throws std::runtime_error on I/O
/// failure.
void emit_dataset(const std::vector<DatasetRecord>& records, const RunMetrics& metrics,
                  const nlohmann::ordered_json& run_info, const std::filesystem::path& dir);

/// Reads dataset.jsonl; SVG text is loaded from the recorded paths.
std::vector<DatasetRecord> read_dataset(const std::filesystem::path& dir);

/// Rewrites dataset.jsonl only.
void write_dataset_jsonl(const std::vector<DatasetRecord>& records, const std::filesystem::path& dir);

}  // namespace diagen::pipeline
