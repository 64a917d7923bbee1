#include "diagen/refine/verdict.hpp"

#include <stdexcept>

#include <boost/regex.hpp>
#include <fmt/format.h>

namespace diagen::refine {

const std::array<std::string_view, kCriteriaCount>& criteria_names() {
  static const std::array<std::string_view, kCriteriaCount> kNames = {
      "Correct Representation", "Proper Relationships", "Legible Text",   "Simplicity",
      "Cultural Sensitivity",   "Organized Structure",  "No Unnecessary Repetition",
  };
  return kNames;
}

int JudgeVerdict::satisfied() const {
  int n = 0;
  for (bool c : criteria) n += c ? 1 : 0;
  return n;
}

namespace {

// Boost's '.' matches newlines unless (?-s) is given; Python's does not.
const boost::regex& score_pattern() {
  static const boost::regex re(R"((?i)<(good|bad)>)");
  return re;
}
const boost::regex& suggestion_pattern() {
  static const boost::regex re(R"((?i-s)\bsuggestion[s]?:\s*(.*))");
  return re;
}
const boost::regex& comment_pattern() {
  static const boost::regex re(R"((?i-s)\bcomment:\s*(.*))");
  return re;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

JudgeVerdict parse_verdict(std::string_view judge_text, std::string judge_name) {
  JudgeVerdict v;
  v.judge_name = std::move(judge_name);
  const std::string text(judge_text);

  std::size_t i = 0;
  for (boost::sregex_iterator it(text.begin(), text.end(), score_pattern()), end;
       it != end && i < kCriteriaCount; ++it, ++i) {
    const std::string token = (*it)[1].str();
    v.criteria[i] = token.size() == 4 && (token[0] == 'g' || token[0] == 'G');
  }

  boost::smatch m;
  if (boost::regex_search(text, m, suggestion_pattern())) v.suggestion = trim(m[1].str());
  if (boost::regex_search(text, m, comment_pattern())) v.comment = trim(m[1].str());
  return v;
}

Aggregate aggregate(const std::vector<JudgeVerdict>& verdicts) {
  if (verdicts.empty()) throw std::invalid_argument("aggregate needs at least one verdict");
  Aggregate a;
  double total = 0.0;
  for (const JudgeVerdict& v : verdicts) {
    total += v.score();
    if (!a.suggestions.empty()) a.suggestions += '\n';
    a.suggestions += fmt::format("{}: {}", v.judge_name, v.suggestion);
  }
  a.score = total / static_cast<double>(verdicts.size());
  return a;
}

}  // namespace diagen::refine
