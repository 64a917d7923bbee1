#include "diagen/qa/eval.hpp"

#include <sstream>
#include <stdexcept>

#include <boost/regex.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "diagen/qa/mcq.hpp"
#include "diagen/refine/prompts.hpp"

namespace diagen::qa {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view strip(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<std::string> parse_answer_letter(std::string_view completion) {
  static const boost::regex token(R"(\b[A-D]+\b)");
  std::string_view body = strip(completion);
  const std::size_t nl = body.rfind('\n');
  const std::string last(strip(nl == std::string_view::npos ? body : body.substr(nl + 1)));
  boost::smatch m;
  if (!boost::regex_search(last, m, token)) return std::nullopt;
  return m[0].str();
}

double accuracy(std::span<const std::optional<std::string>> parsed, std::span<const std::string> keys) {
  if (parsed.size() != keys.size()) {
    throw std::invalid_argument(fmt::format("accuracy: {} answers for {} keys", parsed.size(), keys.size()));
  }
  if (parsed.empty()) {
    spdlog::warn("accuracy over an empty list is taken as 1.0");
    return 1.0;
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (parsed[i] && *parsed[i] == keys[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(keys.size());
}

std::vector<EvalItem> parse_eval_jsonl(std::string_view text) {
  std::vector<EvalItem> items;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      EvalItem it;
      it.subject = j.value("subject", std::string());
      it.image_path = j.at("image").get<std::string>();
      it.question = j.at("question").get<std::string>();
      const auto opts = j.at("options").get<std::vector<std::string>>();
      if (opts.size() != 4) throw std::runtime_error("expected 4 options");
      std::copy(opts.begin(), opts.end(), it.options.begin());
      it.key = j.at("key").get<std::string>();
      items.push_back(std::move(it));
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("eval line {}: {}", lineno, e.what()));
    }
  }
  return items;
}

std::string evaluation_prompt(std::string_view template_text, const EvalItem& item) {
  McqFields f;
  f.question = item.question;
  f.options = item.options;
  return refine::fill_template(template_text, {{"Question", question_block(f)}});
}

EvalReport evaluate(std::span<const EvalItem> items, model::ChatClient& client, std::string_view template_text,
                    const ImageLoader& load_image, model::UsageLedger* ledger) {
  EvalReport report;
  report.model_name = client.name();
  for (const EvalItem& item : items) {
    const std::vector<model::ChatMessage> messages = {model::ChatMessage::user(
        evaluation_prompt(template_text, item), {model::ImagePart{"image/svg+xml", load_image(item.image_path)}})};
    const auto answer = parse_answer_letter(model::complete_recorded(client, messages, ledger).text);
    const bool ok = answer && *answer == item.key;
    ++report.all.total;
    if (ok) ++report.all.correct;
    if (!item.subject.empty()) {
      auto it = std::find_if(report.subjects.begin(), report.subjects.end(),
                             [&](const SubjectAccuracy& s) { return s.subject == item.subject; });
      if (it == report.subjects.end()) it = report.subjects.insert(report.subjects.end(), {item.subject});
      ++it->total;
      if (ok) ++it->correct;
    }
    report.answers.push_back(answer);
  }
  return report;
}

std::string accuracy_header(const EvalReport& report) {
  std::string out = "Model Name | All";
  for (const SubjectAccuracy& s : report.subjects) out += " | " + s.subject;
  return out;
}

std::string accuracy_row(const EvalReport& report) {
  std::string out = fmt::format("{} | {:.2f}", report.model_name, 100.0 * report.all.accuracy());
  for (const SubjectAccuracy& s : report.subjects) out += fmt::format(" | {:.2f}", 100.0 * s.accuracy());
  return out;
}

}  // namespace diagen::qa
