#include "diagen/qa/mcq.hpp"

#include <algorithm>
#include <cctype>
#include <random>

#include <boost/regex.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "diagen/refine/prompts.hpp"

namespace diagen::qa {

const std::array<SkillCategory, kSkillCount>& all_skills() {
  static const std::array<SkillCategory, kSkillCount> all = {
      SkillCategory::VisualRecognition, SkillCategory::ArithmeticCalculations,
      SkillCategory::ScientificKnowledge, SkillCategory::SpatialRelationships,
      SkillCategory::LogicalReasoning};
  return all;
}

std::string_view to_string(SkillCategory c) {
  switch (c) {
    case SkillCategory::VisualRecognition: return "Visual Recognition";
    case SkillCategory::ArithmeticCalculations: return "Arithmetic Calculations";
    case SkillCategory::ScientificKnowledge: return "Scientific Knowledge";
    case SkillCategory::SpatialRelationships: return "Spatial Relationships";
    case SkillCategory::LogicalReasoning: return "Logical Reasoning";
  }
  return "?";
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string normalize_newlines(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    out += text[i];
  }
  return out;
}

}  // namespace

std::optional<SkillCategory> skill_from_name(std::string_view name) {
  const std::string key = lower(trim(name));
  for (SkillCategory c : all_skills()) {
    if (lower(std::string(to_string(c))) == key) return c;
  }
  return std::nullopt;
}

std::map<SkillCategory, std::string> parse_skill_descriptions(std::string_view json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  std::map<SkillCategory, std::string> out;
  for (const auto& [name, text] : j.items()) {
    const auto c = skill_from_name(name);
    if (!c) throw std::runtime_error(fmt::format("unknown skill category '{}'", name));
    out[*c] = text.get<std::string>();
  }
  if (out.size() != kSkillCount) throw std::runtime_error("skill descriptions must cover all five categories");
  return out;
}

McqFields parse_mcq(std::string_view raw) {
  static const boost::regex question(R"((?si)question\s*\d*:\s*(.*?)(?=\n[A-D]\)))");
  static const boost::regex option(R"(\n([A-D])\)\s*([^\n]+))");
  static const boost::regex reasoning(R"((?-s)Reasoning\s*:\s*(.*))");
  static const boost::regex category(R"((?-s)Category\s*:\s*(.*))");
  static const boost::regex answer(R"((?i-s)(?<=\W)\nanswer(?=\W).*?\b([A-D])\)\s*([^\n]+))");

  const std::string text = normalize_newlines(raw);
  McqFields f;
  boost::smatch m;
  if (!boost::regex_search(text, m, question)) throw McqParseError("mcq: question not found");
  f.question = trim(m[1].str());

  std::array<bool, 4> seen{};
  for (boost::sregex_iterator it(text.begin(), text.end(), option), end; it != end; ++it) {
    const int k = (*it)[1].str()[0] - 'A';
    f.options[k] = trim((*it)[2].str());
    seen[k] = true;
  }
  for (int k = 0; k < 4; ++k) {
    if (!seen[k]) throw McqParseError(fmt::format("mcq: option {} not found", static_cast<char>('A' + k)));
  }

  if (!boost::regex_search(text, m, reasoning)) throw McqParseError("mcq: reasoning not found");
  f.rationale = trim(m[1].str());

  if (!boost::regex_search(text, m, category)) throw McqParseError("mcq: category not found");
  const auto c = skill_from_name(m[1].str());
  if (!c) throw McqParseError(fmt::format("mcq: unknown category '{}'", trim(m[1].str())));
  f.category = *c;

  if (!boost::regex_search(text, m, answer)) throw McqParseError("mcq: answer not found");
  f.answer_key = m[1].str()[0];
  return f;
}

std::string render_mcq(std::string_view format_template, const McqFields& f) {
  const int key = f.answer_key - 'A';
  return refine::fill_template(format_template, {{"category", std::string(to_string(f.category))},
                                                 {"reasoning", f.rationale},
                                                 {"question", f.question},
                                                 {"a", f.options[0]},
                                                 {"b", f.options[1]},
                                                 {"c", f.options[2]},
                                                 {"d", f.options[3]},
                                                 {"answer_letter", std::string(1, f.answer_key)},
                                                 {"answer_text", key >= 0 && key < 4 ? f.options[key] : ""}});
}

SkillCategory sample_category(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return all_skills()[static_cast<std::size_t>(u * kSkillCount)];
}

std::string mcq_prompt(const QaTemplates& t, const McqContext& ctx, std::span<const MCQItem> past,
                       SkillCategory category) {
  const std::string example = refine::fill_template(
      t.format, {{"category", "<skill category>"},
                 {"reasoning", "<reasoning and rationale for the correct answer>"},
                 {"question", "<question>"},
                 {"a", "<option A>"},
                 {"b", "<option B>"},
                 {"c", "<option C>"},
                 {"d", "<option D>"},
                 {"answer_letter", "<letter>"},
                 {"answer_text", "<option text>"}});
  std::string past_block;
  const std::size_t from = past.size() > kPastQuestionWindow ? past.size() - kPastQuestionWindow : 0;
  if (from < past.size()) {
    past_block = "Questions already asked about this diagram (ask something different):";
    for (std::size_t i = from; i < past.size(); ++i) past_block += "\n- " + past[i].fields.question;
  }
  const auto desc = t.skills.find(category);
  const std::string skill_block =
      fmt::format("Skill category: {}\n{}", to_string(category), desc == t.skills.end() ? "" : desc->second);
  const std::string context = fmt::format("\nSubstance code:\n{}\n\nDescription: {}\n", ctx.substance, ctx.caption);
  return refine::fill_template(t.generation, {{"context", context},
                                              {"format_template", example},
                                              {"past_questions_prompt", past_block},
                                              {"skill_category_prompt", skill_block}});
}

MCQItem generate_mcq(const McqContext& ctx, std::span<const MCQItem> past, model::ChatClient& client,
                     std::uint64_t seed, const QaTemplates& t, model::UsageLedger* ledger) {
  const SkillCategory category = sample_category(seed);
  const std::vector<model::ChatMessage> messages = {
      model::ChatMessage::user(mcq_prompt(t, ctx, past, category), {model::ImagePart{"image/svg+xml", ctx.svg}})};
  std::string last_error;
  for (int attempt = 1; attempt <= kMcqAttempts; ++attempt) {
    const model::Completion reply = model::complete_recorded(client, messages, ledger);
    try {
      MCQItem item{parse_mcq(reply.text), ctx.program_id, ctx.seed};
      if (item.fields.category != category) {
        spdlog::debug("mcq for {}: asked for {}, got {}", ctx.program_id, to_string(category),
                      to_string(item.fields.category));
      }
      return item;
    } catch (const McqParseError& e) {
      last_error = e.what();
      spdlog::warn("mcq for {} attempt {}: {}", ctx.program_id, attempt, last_error);
    }
  }
  throw McqParseError(fmt::format("no parseable question after {} attempts ({})", kMcqAttempts, last_error));
}

std::optional<bool> parse_yes_no(std::string_view text) {
  static const boost::regex yn(R"((?i)\b(yes|no)\b)");
  const std::string s(text);
  boost::smatch m;
  if (!boost::regex_search(s, m, yn)) return std::nullopt;
  return lower(m[1].str()) == "yes";
}

std::string question_block(const McqFields& f) {
  return fmt::format("{}\nA) {}\nB) {}\nC) {}\nD) {}", f.question, f.options[0], f.options[1], f.options[2],
                     f.options[3]);
}

bool self_verify(const MCQItem& item, const McqContext& ctx, model::ChatClient& client, const QaTemplates& t,
                 model::UsageLedger* ledger) {
  auto probe = [&](const model::ChatMessage& msg) -> std::optional<bool> {
    const std::vector<model::ChatMessage> messages = {msg};
    for (int attempt = 0; attempt < 2; ++attempt) {
      if (auto v = parse_yes_no(model::complete_recorded(client, messages, ledger).text)) return v;
    }
    return std::nullopt;
  };
  const std::string q = question_block(item.fields);
  const int key = item.fields.answer_key - 'A';
  const std::string answer = fmt::format("{}) {}", item.fields.answer_key, item.fields.options.at(key));

  const auto blind = probe(model::ChatMessage::user(refine::fill_template(t.verify_blind, {{"question", q}})));
  const auto sighted = probe(model::ChatMessage::user(
      refine::fill_template(t.verify_answer, {{"question", q}, {"answer", answer}}),
      {model::ImagePart{"image/svg+xml", ctx.svg}}));
  return blind == false && sighted == true;
}

}  // namespace diagen::qa
