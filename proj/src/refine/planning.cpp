#include "diagen/refine/planning.hpp"

#include <map>
#include <random>

#include <boost/regex.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "diagen/refine/prompts.hpp"

namespace diagen::refine {

std::vector<std::string> parse_idea_list(std::string_view text) {
  static const boost::regex item(R"((?-s)^[ \t]*(?:\d+[.)]|[-*])[ \t]+(\S.*?)[ \t\r]*$)");
  std::vector<std::string> ideas;
  const std::string s(text);
  for (boost::sregex_iterator it(s.begin(), s.end(), item), end; it != end; ++it) {
    ideas.push_back((*it)[1].str());
  }
  return ideas;
}

IdeaList plan_knowledge(std::string_view domain_name, std::string_view prompt, std::size_t n,
                        model::ChatClient& client, int max_parse_retries, model::UsageLedger* ledger) {
  IdeaList list;
  list.domain_name = std::string(domain_name);
  const std::vector<model::ChatMessage> messages = {model::ChatMessage::user(std::string(prompt))};
  for (int attempt = 0; attempt <= max_parse_retries; ++attempt) {
    const model::Completion reply = model::complete_recorded(client, messages, ledger);
    std::vector<std::string> ideas = parse_idea_list(reply.text);
    if (!ideas.empty()) {
      if (ideas.size() > n) ideas.resize(n);
      list.ideas = std::move(ideas);
      list.retries = attempt;
      return list;
    }
    spdlog::warn("knowledge planning for {}: no list in reply (attempt {})", domain_name, attempt + 1);
  }
  throw FailedParseLimit(fmt::format("knowledge planning for {} produced no parseable list after {} attempts",
                                     domain_name, max_parse_retries + 1));
}

std::string code_planning_prompt(std::string_view template_text, const CodePlanRequest& r) {
  if (r.shots.empty()) throw std::invalid_argument("code planning needs at least one shot example");
  std::string shots;
  for (std::size_t i = 0; i < r.shots.size(); ++i) {
    if (i > 0) shots += "\n\nsubstance:";
    shots += r.shots[i];
  }
  std::string instructions = r.instructions;
  if (!r.idea.empty()) {
    instructions += instructions.empty() ? "" : "\n\n";
    instructions += fmt::format("Example {}: {}", r.index, r.idea);
  }
  return fill_template(template_text, {{"domain_instructions", instructions},
                                       {"documentation_content", r.docs},
                                       {"domain_code", r.domain_code},
                                       {"domain_name", r.domain_name},
                                       {"substance_code_shot_content", shots},
                                       {"idx", std::to_string(r.index)}});
}

std::string plan_code(std::string_view template_text, const CodePlanRequest& request,
                      model::ChatClient& client, model::UsageLedger* ledger) {
  const std::vector<model::ChatMessage> messages = {
      model::ChatMessage::user(code_planning_prompt(template_text, request))};
  return model::complete_recorded(client, messages, ledger).text;
}

std::string scale_prompt(std::string_view template_text, std::string_view domain_name,
                         std::string_view domain_code, const std::vector<PromptExample>& examples,
                         model::ChatClient& client, model::UsageLedger* ledger) {
  std::map<std::string, std::string> values{{"domain name", std::string(domain_name)},
                                            {"domain code", std::string(domain_code)}};
  for (std::size_t i = 0; i < 3; ++i) {
    const PromptExample e = i < examples.size() ? examples[i] : PromptExample{};
    values[fmt::format("example domain name {}", i + 1)] = e.domain_name;
    values[fmt::format("example Penrose domain code {}", i + 1)] = e.domain_code;
    values[fmt::format("example domain knowledge planning prompt {}", i + 1)] = e.prompt;
  }
  const std::vector<model::ChatMessage> messages = {
      model::ChatMessage::user(fill_template(template_text, values))};
  return model::complete_recorded(client, messages, ledger).text;
}

std::vector<std::size_t> select_judges(std::size_t pool_size, std::size_t k, std::uint64_t seed,
                                       bool with_replacement) {
  if (!with_replacement && k > pool_size) {
    throw std::invalid_argument(
        fmt::format("cannot pick {} distinct judges from a pool of {}", k, pool_size));
  }
  if (pool_size == 0 && k > 0) throw std::invalid_argument("judge pool is empty");
  std::mt19937_64 gen(seed);
  auto below = [&](std::size_t bound) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return static_cast<std::size_t>(u * static_cast<double>(bound));
  };
  std::vector<std::size_t> out;
  if (with_replacement) {
    for (std::size_t i = 0; i < k; ++i) out.push_back(below(pool_size));
    return out;
  }
  std::vector<std::size_t> idx(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(idx[i], idx[i + below(pool_size - i)]);
    out.push_back(idx[i]);
  }
  return out;
}

}  // namespace diagen::refine
