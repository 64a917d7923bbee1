#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "diagen/dsl/domain.hpp"
#include "diagen/model/chat.hpp"

namespace diagen::refine {

/// Planner output could not be parsed within the retry budget.
class FailedParseLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IdeaList {
  std::string domain_name;
  std::vector<std::string> ideas;
  int retries = 0;  // attempts beyond the first
};

/// Items of a numbered (`1.`, `2)`) or bulleted (`-`, `*`) list, in order.
std::vector<std::string> parse_idea_list(std::string_view text);

/// Asks the planner for `n` ideas with `prompt`; an unparseable reply is
/// re-asked up to `max_parse_retries` more times. Keeps the first `n` items.
IdeaList plan_knowledge(std::string_view domain_name, std::string_view prompt, std::size_t n,
                        model::ChatClient& client, int max_parse_retries = 3,
                        model::UsageLedger* ledger = nullptr);

struct CodePlanRequest {
  std::string domain_name;
  std::string instructions;  // domain-specific coding instructions
  std::string idea;
  int index = 1;             // 1-based example number
  std::string domain_code;   // schema text
  std::string docs;
  std::vector<std::string> shots;
};

/// Fills the code-planning template. Throws std::invalid_argument without shots.
std::string code_planning_prompt(std::string_view template_text, const CodePlanRequest& request);

/// Sends the code-planning prompt and returns the reply unchanged.
std::string plan_code(std::string_view template_text, const CodePlanRequest& request,
                      model::ChatClient& client, model::UsageLedger* ledger = nullptr);

struct PromptExample {
  std::string domain_name;
  std::string domain_code;
  std::string prompt;
};

/// Drafts a knowledge-planning prompt for a new domain from up to three
/// examples. The reply is returned unchanged and needs human review.
std::string scale_prompt(std::string_view template_text, std::string_view domain_name,
                         std::string_view domain_code, const std::vector<PromptExample>& examples,
                         model::ChatClient& client, model::UsageLedger* ledger = nullptr);

/// Seeded choice of `k` pool indices: a partial Fisher-Yates shuffle without
/// replacement, or independent draws with it. Throws std::invalid_argument
/// when k exceeds the pool without replacement.
std::vector<std::size_t> select_judges(std::size_t pool_size, std::size_t k, std::uint64_t seed,
                                       bool with_replacement = false);

}  // namespace diagen::refine
