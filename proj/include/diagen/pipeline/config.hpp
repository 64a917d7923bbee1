#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "diagen/layout/solver.hpp"
#include "diagen/model/http.hpp"

namespace diagen::pipeline {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parsed config file: `[section]` headers and `key = value` lines, where a
/// value is a "string", a number or true/false. `#` starts a comment outside
/// strings. Keys before any header live in section "".
using ConfigValue = std::variant<std::string, double, bool>;
using ConfigTable = std::map<std::string, std::map<std::string, ConfigValue>>;

ConfigTable parse_config_table(std::string_view text);

struct PipelineConfig {
  std::filesystem::path config_dir;

  std::string domain_name;
  std::filesystem::path domain_file;
  std::filesystem::path style_file;
  std::filesystem::path knowledge_prompt_file;
  std::filesystem::path instructions_file;  // optional
  std::filesystem::path docs_file;          // optional
  std::filesystem::path shots_dir;          // *.substance, sorted by name
  std::filesystem::path captions_file;
  std::filesystem::path prompt_dir;         // empty: bundled prompts
  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> mock_script;

  model::ModelEndpoint planner;
  model::ModelEndpoint coder;
  model::ModelEndpoint qa;
  model::ModelEndpoint eval;  // model under evaluation
  std::vector<model::ModelEndpoint> judge_pool;  // [judge.<name>] sections, by name

  std::size_t ideas = 10;
  std::size_t judges_per_round = 3;
  int max_rounds = 8;
  double threshold = 0.85;
  std::size_t dedup_threshold = 2;
  int variations = 10;
  std::uint64_t base_seed = 0;
  int qa_per_diagram = 1;
  bool knowledge_planning = true;
  bool code_planning = true;
  bool early_stop = true;
  bool self_verify = true;
  int workers = 0;  // 0: hardware threads
  layout::SolverSettings solver;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Relative paths resolve against `base_dir`. Unknown keys are errors.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace diagen::pipeline
