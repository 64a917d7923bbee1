#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diagen/model/chat.hpp"

namespace diagen::qa {

/// Strips the completion, keeps its last line and returns the first token of
/// letters A-D on it.
std::optional<std::string> parse_answer_letter(std::string_view completion);

/// Fraction of parsed answers equal to their key; unparsed answers count as
/// wrong. Empty input gives 1.0 with a warning. Throws std::invalid_argument
/// on a length mismatch.
double accuracy(std::span<const std::optional<std::string>> parsed, std::span<const std::string> keys);

struct EvalItem {
  std::string subject;     // empty: counted in the overall score only
  std::string image_path;  // relative paths resolve against the JSONL's directory
  std::string question;
  std::array<std::string, 4> options;
  std::string key;
};

/// Lines of {"subject", "image", "question", "options": [4], "key"}.
std::vector<EvalItem> parse_eval_jsonl(std::string_view text);

/// The evaluation template with the question and options filled in.
std::string evaluation_prompt(std::string_view template_text, const EvalItem& item);

struct SubjectAccuracy {
  std::string subject;
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy() const { return total == 0 ? 1.0 : static_cast<double>(correct) / total; }
};

struct EvalReport {
  std::string model_name;
  SubjectAccuracy all{"All"};
  std::vector<SubjectAccuracy> subjects;  // non-empty subjects, in order of first appearance
  std::vector<std::optional<std::string>> answers;
};

using ImageLoader = std::function<std::string(const std::string& path)>;

/// Asks `client` every item with its image attached and scores the replies.
EvalReport evaluate(std::span<const EvalItem> items, model::ChatClient& client, std::string_view template_text,
                    const ImageLoader& load_image, model::UsageLedger* ledger = nullptr);

/// "Model Name | All | <subjects...>" and the matching row of percentages.
std::string accuracy_header(const EvalReport& report);
std::string accuracy_row(const EvalReport& report);

}  // namespace diagen::qa
