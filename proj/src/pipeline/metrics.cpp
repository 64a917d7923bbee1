#include "diagen/pipeline/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace diagen::pipeline {

const std::array<std::size_t, 5>& metric_column_criteria() {
  // PR, LT, SP, NR, CR in the judge's criterion order.
  static const std::array<std::size_t, 5> idx = {1, 2, 3, 6, 0};
  return idx;
}

void RunMetrics::add_verdicts(std::span<const refine::JudgeVerdict> verdicts) {
  if (verdicts.empty()) return;
  for (std::size_t c = 0; c < refine::kCriteriaCount; ++c) {
    double good = 0;
    for (const refine::JudgeVerdict& v : verdicts) good += v.criteria[c] ? 1.0 : 0.0;
    criteria_sum[c] += good / static_cast<double>(verdicts.size());
  }
  ++judged;
}

double RunMetrics::criterion_mean(std::size_t criterion) const {
  return judged == 0 ? 0.0 : criteria_sum.at(criterion) / static_cast<double>(judged);
}

double yield_rate(const RunMetrics& m) {
  if (m.attempted == 0) throw std::invalid_argument("yield rate of a run with no attempts");
  return static_cast<double>(m.admitted) / static_cast<double>(m.attempted);
}

double compile_rate(const RunMetrics& m) {
  if (m.attempted == 0) throw std::invalid_argument("compile rate of a run with no attempts");
  return static_cast<double>(m.compiled) / static_cast<double>(m.attempted);
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("cosine similarity: length mismatch");
  if (u.empty()) throw std::invalid_argument("cosine similarity: empty vectors");
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw std::invalid_argument("cosine similarity: zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

nlohmann::ordered_json metrics_json(const RunMetrics& m) {
  nlohmann::ordered_json j;
  j["attempted"] = m.attempted;
  j["compiled"] = m.compiled;
  j["admitted"] = m.admitted;
  j["rounds_total"] = m.rounds_total;
  j["records"] = m.records;
  j["unconverged_variations"] = m.unconverged_variations;
  j["input_tokens"] = m.input_tokens;
  j["output_tokens"] = m.output_tokens;
  j["requests"] = m.requests;
  j["judged"] = m.judged;
  if (m.attempted > 0) {
    j["compile_rate"] = compile_rate(m);
    j["yield_rate"] = yield_rate(m);
  } else {
    j["compile_rate"] = nullptr;
    j["yield_rate"] = nullptr;
  }
  nlohmann::ordered_json criteria = nlohmann::ordered_json::object();
  const auto& names = refine::criteria_names();
  for (std::size_t c = 0; c < refine::kCriteriaCount; ++c) criteria[std::string(names[c])] = m.criterion_mean(c);
  j["criteria"] = criteria;
  nlohmann::ordered_json sums = nlohmann::ordered_json::array();
  for (double s : m.criteria_sum) sums.push_back(s);
  j["criteria_sum"] = sums;
  return j;
}

RunMetrics metrics_from_json(const nlohmann::json& j) {
  RunMetrics m;
  m.attempted = j.at("attempted").get<std::size_t>();
  m.compiled = j.at("compiled").get<std::size_t>();
  m.admitted = j.at("admitted").get<std::size_t>();
  m.rounds_total = j.value("rounds_total", std::size_t{0});
  m.records = j.value("records", std::size_t{0});
  m.unconverged_variations = j.value("unconverged_variations", std::size_t{0});
  m.input_tokens = j.value("input_tokens", std::uint64_t{0});
  m.output_tokens = j.value("output_tokens", std::uint64_t{0});
  m.requests = j.value("requests", std::uint64_t{0});
  m.judged = j.value("judged", std::size_t{0});
  if (j.contains("criteria_sum")) {
    const auto sums = j.at("criteria_sum").get<std::vector<double>>();
    for (std::size_t c = 0; c < refine::kCriteriaCount && c < sums.size(); ++c) m.criteria_sum[c] = sums[c];
  }
  return m;
}

std::string metrics_table(const RunMetrics& m) {
  double avg = 0;
  std::string cols;
  for (std::size_t c : metric_column_criteria()) {
    const double v = 100.0 * m.criterion_mean(c);
    avg += v;
    cols += fmt::format(" | {:.1f}", v);
  }
  avg /= static_cast<double>(metric_column_criteria().size());
  const double compile = m.attempted ? 100.0 * compile_rate(m) : 0.0;
  const double yield = m.attempted ? 100.0 * yield_rate(m) : 0.0;
  const double rounds = m.attempted ? static_cast<double>(m.rounds_total) / m.attempted : 0.0;
  return fmt::format("Avg | PR | LT | SP | NR | CR | Compile % | Yield % | Rounds\n{:.1f}{} | {:.1f} | {:.1f} | {:.2f}",
                     avg, cols, compile, yield, rounds);
}

}  // namespace diagen::pipeline
