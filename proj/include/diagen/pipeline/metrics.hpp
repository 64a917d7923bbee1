#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "diagen/refine/verdict.hpp"

namespace diagen::pipeline {

/// Criterion columns of the ablation table, in column order.
inline constexpr std::array<std::string_view, 5> kMetricColumns = {"PR", "LT", "SP", "NR", "CR"};

/// Index into criteria_names() for each entry of kMetricColumns.
const std::array<std::size_t, 5>& metric_column_criteria();

struct RunMetrics {
  std::size_t attempted = 0;
  std::size_t compiled = 0;
  std::size_t admitted = 0;
  std::size_t rounds_total = 0;
  std::size_t records = 0;
  std::size_t unconverged_variations = 0;
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  std::uint64_t requests = 0;
  /// Sum over admitted programs of the fraction of final judges marking each
  /// criterion GOOD; divide by `judged` for the mean.
  std::array<double, refine::kCriteriaCount> criteria_sum{};
  std::size_t judged = 0;

  /// Adds one admitted program's final verdicts.
  void add_verdicts(std::span<const refine::JudgeVerdict> verdicts);
  /// Mean for one criterion in [0, 1]; 0 when nothing was judged.
  double criterion_mean(std::size_t criterion) const;
};

/// admitted / attempted. Throws std::invalid_argument when attempted is 0.
double yield_rate(const RunMetrics& m);
/// compiled / attempted. Throws std::invalid_argument when attempted is 0.
double compile_rate(const RunMetrics& m);

/// <u, v> / (|u| |v|). Throws std::invalid_argument on a length mismatch,
/// empty input or a zero vector.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

nlohmann::ordered_json metrics_json(const RunMetrics& m);
RunMetrics metrics_from_json(const nlohmann::json& j);

/// "Avg | PR | LT | SP | NR | CR | Compile % | Yield % | Rounds" with values.
std::string metrics_table(const RunMetrics& m);

}  // namespace diagen::pipeline
