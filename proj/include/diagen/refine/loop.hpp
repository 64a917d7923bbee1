#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diagen/dsl/substance.hpp"
#include "diagen/model/chat.hpp"
#include "diagen/refine/verdict.hpp"

namespace diagen::refine {

enum class Outcome { Accepted, Exhausted, FailedParseLimit };

std::string_view to_string(Outcome outcome);

struct RefineSettings {
  int max_rounds = 8;        // N_max, coder calls per candidate
  double threshold = 0.85;   // theta
  bool early_stop = true;    // false: run every round, keep the best-scored program
  std::uint64_t base_seed = 0;
  std::string intent;        // shown to judges
  std::string judge_template;
  std::string criteria_text;

  /// Throws std::invalid_argument unless max_rounds >= 1 and threshold in (0, 1].
  void validate() const;
};

struct RoundRecord {
  enum class Status { NoProgram, Failed, Scored };
  int round = 0;  // 1-based
  Status status = Status::NoProgram;
  std::optional<double> score;
  std::string error;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct RefineState {
  int rounds = 0;
  std::vector<model::ChatMessage> transcript;
  std::optional<dsl::SubstanceProgram> last_program;
  std::string last_source;  // extracted text of last_program
  std::optional<double> last_score;
  Outcome outcome = Outcome::FailedParseLimit;
  std::vector<RoundRecord> history;
  std::vector<JudgeVerdict> last_verdicts;
  model::UsageTally usage;

  friend bool operator==(const RefineState&, const RefineState&) = default;
};

/// Text -> program; throws (ParseError or anything else) on failure.
using ParseFn = std::function<dsl::SubstanceProgram(const std::string&)>;
/// Program + layout seed -> SVG document; throws on compile or layout failure.
using RenderFn = std::function<std::string(const dsl::SubstanceProgram&, std::uint64_t)>;

std::string reminder_message();
std::string error_message(std::string_view what);
std::string suggestion_message(double score, double threshold, std::string_view suggestions);
std::string judge_prompt(const RefineSettings& settings);

/// Iterative visual refinement of one candidate. Each round asks the coder,
/// extracts and parses a program, renders one diagram per judge with seed
/// base_seed + k and averages the judge scores. Any round that is not accepted
/// appends exactly one feedback message. Client errors propagate.
RefineState iterative_visual_refine(const std::string& initial_prompt, const RefineSettings& settings,
                                    model::ChatClient& coder, std::span<model::ChatClient* const> judges,
                                    const ParseFn& parse, const RenderFn& render,
                                    model::UsageLedger* ledger = nullptr);

/// One JSON object per message: role, text, image count.
std::string transcript_jsonl(std::span<const model::ChatMessage> transcript);

}  // namespace diagen::refine
