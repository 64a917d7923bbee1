#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "diagen/dedup/store.hpp"
#include "diagen/dsl/domain.hpp"
#include "diagen/dsl/style.hpp"
#include "diagen/dsl/substance.hpp"
#include "diagen/model/chat.hpp"
#include "diagen/pipeline/config.hpp"
#include "diagen/pipeline/metrics.hpp"
#include "diagen/qa/caption.hpp"
#include "diagen/qa/mcq.hpp"
#include "diagen/refine/loop.hpp"

namespace diagen::pipeline {

/// Everything a run reads from disk, parsed once.
struct DomainAssets {
  std::string domain_text;
  dsl::DomainSchema schema;
  dsl::StyleSheet style;
  std::string knowledge_prompt;
  std::string instructions;
  std::string docs;
  std::vector<std::string> shots;
  qa::CaptionTemplates captions;
  qa::QaTemplates qa;
  std::string knowledge_list_template;
  std::string code_planning_template;
  std::string generate_template;
  std::string judge_template;
  std::string criteria_text;
};

/// Throws ConfigError for missing files and for domain or style errors.
DomainAssets load_assets(const PipelineConfig& config);

struct Clients {
  model::ChatClient* planner = nullptr;
  model::ChatClient* coder = nullptr;
  std::vector<model::ChatClient*> judge_pool;
  model::ChatClient* qa = nullptr;
};

struct DatasetRecord {
  std::string program_id;
  std::string domain_name;
  std::string substance;  // canonical text
  std::uint64_t seed = 0;
  std::string svg_path;   // relative to the output directory
  std::string svg;        // document text, written by emit_dataset
  qa::Caption caption;
  std::vector<qa::MCQItem> qa_items;
  std::optional<double> judge_score;
  int refine_rounds = 0;
  std::string outcome;
};

struct CandidateResult {
  std::size_t index = 0;
  std::string idea;
  std::string plan;
  std::optional<refine::RefineState> state;  // empty when the candidate errored
  std::string error;
  std::optional<std::string> program_id;     // set when admitted
};

struct RunOptions {
  /// Refine candidates one at a time. Scripted clients need this for a
  /// reproducible call order; layout still runs on the worker pool.
  bool sequential = false;
};

struct RunResult {
  std::vector<DatasetRecord> records;
  RunMetrics metrics;
  std::vector<CandidateResult> candidates;
};

/// Generation prompt for one idea, with the code plan when there is one.
std::string generation_prompt(const DomainAssets& assets, const PipelineConfig& config, const std::string& idea,
                              std::size_t index, const std::string& plan);

/// Layout with `seed`, label placement and SVG text.
std::string render_program(const dsl::SubstanceProgram& program, const DomainAssets& assets,
                           const layout::SolverSettings& settings, std::uint64_t seed);

/// idea -> plan -> refine -> dedup -> variations -> caption and QA.
/// Candidate failures are logged and counted; ConfigError and planner parse
/// failures abort.
RunResult run_domain(const PipelineConfig& config, const DomainAssets& assets, Clients& clients,
                     dedup::DedupStore& store, model::UsageLedger& ledger, const RunOptions& options = {});

/// Captions and QA for one rendered variation; used by `generate` and `qa`.
void annotate_record(DatasetRecord& record, const dsl::SubstanceProgram& program, const PipelineConfig& config,
                     const DomainAssets& assets, model::ChatClient* qa_client, std::vector<qa::MCQItem>& past,
                     std::uint64_t qa_seed, model::UsageLedger& ledger);

}  // namespace diagen::pipeline
