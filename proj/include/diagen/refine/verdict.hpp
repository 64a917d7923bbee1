#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace diagen::refine {

inline constexpr std::size_t kCriteriaCount = 7;

/// Judge criteria in the order the judge prompt lists them.
const std::array<std::string_view, kCriteriaCount>& criteria_names();

struct JudgeVerdict {
  std::array<bool, kCriteriaCount> criteria{};  // true = GOOD
  std::string comment;
  std::string suggestion;
  std::string judge_name;

  int satisfied() const;
  double score() const { return static_cast<double>(satisfied()) / kCriteriaCount; }
  friend bool operator==(const JudgeVerdict&, const JudgeVerdict&) = default;
};

/// Maps the first seven `<good>`/`<bad>` tokens (any case) to the criteria in
/// order; criteria without a token are BAD. The suggestion is the rest of the
/// line after the first `suggestion:`/`suggestions:` marker.
JudgeVerdict parse_verdict(std::string_view judge_text, std::string judge_name = {});

struct Aggregate {
  double score = 0.0;
  std::string suggestions;  // "<judge>: <suggestion>" per line
};

/// Mean of per-judge scores. Throws std::invalid_argument on an empty list.
Aggregate aggregate(const std::vector<JudgeVerdict>& verdicts);

}  // namespace diagen::refine
