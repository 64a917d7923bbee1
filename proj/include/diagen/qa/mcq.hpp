#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "diagen/model/chat.hpp"

namespace diagen::qa {

enum class SkillCategory {
  VisualRecognition,
  ArithmeticCalculations,
  ScientificKnowledge,
  SpatialRelationships,
  LogicalReasoning,
};

inline constexpr std::size_t kSkillCount = 5;

const std::array<SkillCategory, kSkillCount>& all_skills();
std::string_view to_string(SkillCategory category);
/// Case-insensitive, surrounding whitespace ignored.
std::optional<SkillCategory> skill_from_name(std::string_view name);

/// Category descriptions, read from {"Visual Recognition": "...", ...}.
/// Throws std::runtime_error unless all five are present.
std::map<SkillCategory, std::string> parse_skill_descriptions(std::string_view json_text);

/// Fields the generator's reply carries.
struct McqFields {
  std::string question;
  std::array<std::string, 4> options;  // A..D
  char answer_key = 'A';
  SkillCategory category = SkillCategory::VisualRecognition;
  std::string rationale;

  friend bool operator==(const McqFields&, const McqFields&) = default;
};

struct MCQItem {
  McqFields fields;
  std::string program_id;
  std::uint64_t seed = 0;

  friend bool operator==(const MCQItem&, const MCQItem&) = default;
};

class McqParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies the question, option, reasoning, category and answer patterns.
/// Options keep the last line seen per letter. Fields are trimmed. Throws
/// McqParseError naming the first missing field.
McqFields parse_mcq(std::string_view text);

/// Fills the format template slots {category} {reasoning} {question} {a} {b}
/// {c} {d} {answer_letter} {answer_text}.
std::string render_mcq(std::string_view format_template, const McqFields& fields);

struct QaTemplates {
  std::string generation;     // slots: context, format_template, past_questions_prompt, skill_category_prompt
  std::string format;         // see render_mcq
  std::string verify_blind;   // slots: question
  std::string verify_answer;  // slots: question, answer
  std::map<SkillCategory, std::string> skills;
};

struct McqContext {
  std::string substance;
  std::string caption;
  std::string svg;
  std::string program_id;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kPastQuestionWindow = 5;
inline constexpr int kMcqAttempts = 3;

/// Uniform category draw from mt19937_64(seed).
SkillCategory sample_category(std::uint64_t seed);

/// The generation prompt for one request; only the last kPastQuestionWindow
/// past questions are listed.
std::string mcq_prompt(const QaTemplates& templates, const McqContext& context,
                       std::span<const MCQItem> past, SkillCategory category);

/// Asks up to kMcqAttempts times with the same prompt and the diagram
/// attached. Throws McqParseError when no reply parses.
MCQItem generate_mcq(const McqContext& context, std::span<const MCQItem> past, model::ChatClient& client,
                     std::uint64_t seed, const QaTemplates& templates, model::UsageLedger* ledger = nullptr);

/// First standalone yes or no, any case.
std::optional<bool> parse_yes_no(std::string_view text);

/// The question and its four options, as shown to the verifier.
std::string question_block(const McqFields& fields);

/// Two probes: the blind probe must answer NO and the probe with the diagram
/// must answer YES. Each probe is asked once more when the reply has no yes
/// or no; a second miss counts as failure. Both probes are always sent.
bool self_verify(const MCQItem& item, const McqContext& context, model::ChatClient& client,
                 const QaTemplates& templates, model::UsageLedger* ledger = nullptr);

}  // namespace diagen::qa
