#include "diagen/pipeline/run.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "diagen/dsl/errors.hpp"
#include "diagen/layout/diagram.hpp"
#include "diagen/refine/extract.hpp"
#include "diagen/refine/planning.hpp"
#include "diagen/refine/prompts.hpp"
#include "diagen/render/svg.hpp"

namespace diagen::pipeline {

namespace {

std::string read_required(const std::filesystem::path& path) {
  try {
    return refine::read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::string read_optional(const std::filesystem::path& path) {
  return path.empty() ? std::string{} : read_required(path);
}

std::string chomp(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

// Runs fn(0..n-1) on up to `workers` threads; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::size_t worker_count(const PipelineConfig& config) {
  if (config.workers > 0) return static_cast<std::size_t>(config.workers);
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

DomainAssets load_assets(const PipelineConfig& config) {
  DomainAssets a;
  a.domain_text = read_required(config.domain_file);
  try {
    a.schema = dsl::parse_domain(a.domain_text);
  } catch (const dsl::ParseError& e) {
    throw ConfigError(fmt::format("{}: {}", config.domain_file.string(), e.what()));
  }
  const std::string style_text = read_required(config.style_file);
  try {
    a.style = dsl::parse_style(style_text, a.schema);
  } catch (const dsl::ParseError& e) {
    throw ConfigError(fmt::format("{}: {}", config.style_file.string(), e.what()));
  }
  a.knowledge_prompt = chomp(read_required(config.knowledge_prompt_file));
  a.instructions = chomp(read_optional(config.instructions_file));
  a.docs = chomp(read_optional(config.docs_file));

  std::vector<std::filesystem::path> shot_files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(config.shots_dir, ec)) {
    if (entry.path().extension() == ".substance") shot_files.push_back(entry.path());
  }
  if (ec) throw ConfigError(fmt::format("cannot list shots directory {}", config.shots_dir.string()));
  std::sort(shot_files.begin(), shot_files.end());
  for (const auto& p : shot_files) {
    std::string text = chomp(read_required(p));
    try {
      dsl::parse_substance(text, a.schema);
    } catch (const dsl::ParseError& e) {
      throw ConfigError(fmt::format("shot {}: {}", p.string(), e.what()));
    }
    a.shots.push_back(std::move(text));
  }
  if (a.shots.empty()) throw ConfigError(fmt::format("no .substance shots in {}", config.shots_dir.string()));

  try {
    a.captions = qa::load_caption_templates(config.captions_file);
  } catch (const qa::CaptionError& e) {
    throw ConfigError(e.what());
  }

  const refine::PromptLibrary lib =
      config.prompt_dir.empty() ? refine::PromptLibrary::bundled() : refine::PromptLibrary(config.prompt_dir);
  try {
    a.knowledge_list_template = lib.get("knowledge_list");
    a.code_planning_template = lib.get("code_planning");
    a.generate_template = lib.get("generate");
    a.judge_template = lib.get("judge");
    a.criteria_text = lib.get("judge_criteria");
    a.qa.generation = lib.get("qa_generation");
    a.qa.format = lib.get("qa_format");
    a.qa.verify_blind = lib.get("verify_blind");
    a.qa.verify_answer = lib.get("verify_answer");
    a.qa.skills = qa::parse_skill_descriptions(refine::read_text_file(lib.dir() / "skill_categories.json"));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return a;
}

std::string generation_prompt(const DomainAssets& a, const PipelineConfig& config, const std::string& idea,
                              std::size_t index, const std::string& plan) {
  std::string shots;
  for (std::size_t i = 0; i < a.shots.size(); ++i) {
    if (i > 0) shots += "\n\n";
    shots += refine::fence(a.shots[i]);
  }
  const std::string plan_block = plan.empty() ? std::string{} : "Your plan:\n" + plan;
  return refine::fill_template(a.generate_template, {{"domain_name", config.domain_name},
                                                     {"domain_instructions", a.instructions},
                                                     {"domain_code", a.domain_text},
                                                     {"documentation_content", a.docs},
                                                     {"substance_code_shot_content", shots},
                                                     {"idea", idea},
                                                     {"idx", std::to_string(index + 1)},
                                                     {"plan", plan_block}});
}

namespace {

layout::Diagram solve_program(const dsl::SubstanceProgram& program, const DomainAssets& a,
                              const layout::SolverSettings& settings, std::uint64_t seed) {
  return render::place_labels(layout::layout(program, a.style, a.schema, seed, settings));
}

}  // namespace

std::string render_program(const dsl::SubstanceProgram& program, const DomainAssets& a,
                           const layout::SolverSettings& settings, std::uint64_t seed) {
  return render::render_svg(solve_program(program, a, settings, seed));
}

void annotate_record(DatasetRecord& record, const dsl::SubstanceProgram& program, const PipelineConfig& config,
                     const DomainAssets& a, model::ChatClient* qa_client, std::vector<qa::MCQItem>& past,
                     std::uint64_t qa_seed, model::UsageLedger& ledger) {
  record.caption = qa::caption_from_substance(program, a.schema, a.captions, record.program_id);
  record.qa_items.clear();
  if (qa_client == nullptr) return;
  const qa::McqContext ctx{record.substance, record.caption.text, record.svg, record.program_id, record.seed};
  for (int q = 0; q < config.qa_per_diagram; ++q) {
    try {
      qa::MCQItem item = qa::generate_mcq(ctx, past, *qa_client, qa_seed + static_cast<std::uint64_t>(q), a.qa, &ledger);
      if (config.self_verify && !qa::self_verify(item, ctx, *qa_client, a.qa, &ledger)) {
        spdlog::info("{} seed {}: question failed self-verification, dropped", record.program_id, record.seed);
        continue;
      }
      past.push_back(item);
      record.qa_items.push_back(std::move(item));
    } catch (const qa::McqParseError& e) {
      spdlog::warn("{} seed {}: {}", record.program_id, record.seed, e.what());
    }
  }
}

RunResult run_domain(const PipelineConfig& config, const DomainAssets& a, Clients& clients,
                     dedup::DedupStore& store, model::UsageLedger& ledger, const RunOptions& options) {
  config.validate();
  if (clients.coder == nullptr || clients.judge_pool.size() < config.judges_per_round) {
    throw ConfigError("coder and judge clients are required");
  }
  RunResult result;
  const std::size_t workers = worker_count(config);

  // Idea
  std::vector<std::string> ideas;
  if (config.knowledge_planning) {
    if (clients.planner == nullptr) throw ConfigError("knowledge planning needs a planner client");
    const std::string prompt = refine::fill_template(
        a.knowledge_list_template,
        {{"domain_prompt", a.knowledge_prompt}, {"n", std::to_string(config.ideas)}, {"domain_name", config.domain_name}});
    refine::IdeaList list = refine::plan_knowledge(config.domain_name, prompt, config.ideas, *clients.planner, 3, &ledger);
    ideas = std::move(list.ideas);
  } else {
    for (std::size_t i = 0; i < config.ideas; ++i) {
      ideas.push_back(fmt::format("example {} of a {} diagram of your choice", i + 1, config.domain_name));
    }
  }

  // Plan and iterate
  result.candidates.resize(ideas.size());
  auto refine_one = [&](std::size_t i) {
    CandidateResult& c = result.candidates[i];
    c.index = i;
    c.idea = ideas[i];
    try {
      if (config.code_planning) {
        refine::CodePlanRequest req{config.domain_name, a.instructions, c.idea, static_cast<int>(i + 1),
                                    a.domain_text,      a.docs,         a.shots};
        c.plan = refine::plan_code(a.code_planning_template, req, *clients.coder, &ledger);
      }
      const std::vector<std::size_t> picks =
          refine::select_judges(clients.judge_pool.size(), config.judges_per_round, config.base_seed + i);
      std::vector<model::ChatClient*> judges;
      for (std::size_t k : picks) judges.push_back(clients.judge_pool[k]);

      refine::RefineSettings rs;
      rs.max_rounds = config.max_rounds;
      rs.threshold = config.threshold;
      rs.early_stop = config.early_stop;
      rs.base_seed = config.base_seed;
      rs.intent = c.idea;
      rs.judge_template = a.judge_template;
      rs.criteria_text = a.criteria_text;
      const refine::ParseFn parse = [&](const std::string& src) { return dsl::parse_substance(src, a.schema); };
      const refine::RenderFn render = [&](const dsl::SubstanceProgram& p, std::uint64_t seed) {
        return render_program(p, a, config.solver, seed);
      };
      c.state = refine::iterative_visual_refine(generation_prompt(a, config, c.idea, i, c.plan), rs, *clients.coder,
                                                judges, parse, render, &ledger);
    } catch (const model::ClientError& e) {
      c.error = e.what();
      spdlog::error("candidate {} ({}): {}", i + 1, c.idea, e.what());
    }
  };
  parallel_for(ideas.size(), options.sequential ? 1 : workers, refine_one);

  // Dedup, in candidate order
  RunMetrics& m = result.metrics;
  m.attempted = ideas.size();
  std::vector<std::size_t> admitted;
  for (CandidateResult& c : result.candidates) {
    if (!c.state) continue;
    m.rounds_total += static_cast<std::size_t>(c.state->rounds);
    if (!c.state->last_program) continue;
    ++m.compiled;
    c.program_id = store.try_admit(*c.state->last_program);
    if (!c.program_id) {
      spdlog::info("candidate {} rejected as a near-duplicate", c.index + 1);
      continue;
    }
    ++m.admitted;
    m.add_verdicts(c.state->last_verdicts);
    admitted.push_back(c.index);
  }

  // Render variations
  const std::size_t nv = static_cast<std::size_t>(config.variations);
  std::vector<std::optional<std::string>> svgs(admitted.size() * nv);
  parallel_for(svgs.size(), workers, [&](std::size_t job) {
    const CandidateResult& c = result.candidates[admitted[job / nv]];
    const std::uint64_t seed = config.base_seed + job % nv;
    layout::Diagram d = solve_program(*c.state->last_program, a, config.solver, seed);
    if (d.meta.converged) svgs[job] = render::render_svg(d);
  });

  // Caption and QA, in record order
  for (std::size_t p = 0; p < admitted.size(); ++p) {
    const CandidateResult& c = result.candidates[admitted[p]];
    const dsl::SubstanceProgram& program = *c.state->last_program;
    std::vector<qa::MCQItem> past;
    for (std::size_t v = 0; v < nv; ++v) {
      const std::uint64_t seed = config.base_seed + v;
      if (!svgs[p * nv + v]) {
        ++m.unconverged_variations;
        spdlog::warn("{} seed {}: layout did not converge, variation dropped", *c.program_id, seed);
        continue;
      }
      DatasetRecord r;
      r.program_id = *c.program_id;
      r.domain_name = config.domain_name;
      r.substance = dsl::serialize_substance(program);
      r.seed = seed;
      r.svg_path = "svg/" + render::svg_file_name(r.program_id, seed);
      r.svg = std::move(*svgs[p * nv + v]);
      r.judge_score = c.state->last_score;
      r.refine_rounds = c.state->rounds;
      r.outcome = std::string(refine::to_string(c.state->outcome));
      annotate_record(r, program, config, a, clients.qa, past, (static_cast<std::uint64_t>(p) << 32) ^ (seed * 16),
                      ledger);
      result.records.push_back(std::move(r));
    }
  }
  m.records = result.records.size();
  const model::UsageTally usage = ledger.total();
  m.input_tokens = usage.input_tokens;
  m.output_tokens = usage.output_tokens;
  m.requests = usage.requests;
  return result;
}

}  // namespace diagen::pipeline
