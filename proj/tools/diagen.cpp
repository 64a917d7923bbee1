#include <cstdio>
#include <fstream>
#include <map>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "diagen/dedup/store.hpp"
#include "diagen/dsl/domain.hpp"
#include "diagen/dsl/errors.hpp"
#include "diagen/dsl/style.hpp"
#include "diagen/dsl/substance.hpp"
#include "diagen/layout/compile.hpp"
#include "diagen/layout/diagram.hpp"
#include "diagen/model/http.hpp"
#include "diagen/model/mock.hpp"
#include "diagen/pipeline/config.hpp"
#include "diagen/pipeline/dataset.hpp"
#include "diagen/pipeline/metrics.hpp"
#include "diagen/pipeline/run.hpp"
#include "diagen/qa/eval.hpp"
#include "diagen/refine/planning.hpp"
#include "diagen/refine/prompts.hpp"
#include "diagen/render/svg.hpp"

namespace fs = std::filesystem;
using namespace diagen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitZeroYield = 2;

struct ClientSet {
  std::vector<std::unique_ptr<model::ChatClient>> owned;
  pipeline::Clients clients;
  model::ChatClient* eval = nullptr;
};

model::ChatClient* keep(ClientSet& set, std::unique_ptr<model::ChatClient> c) {
  set.owned.push_back(std::move(c));
  return set.owned.back().get();
}

ClientSet make_clients(const pipeline::PipelineConfig& config, const std::optional<fs::path>& mock_script,
                       const std::optional<std::string>& audit) {
  ClientSet set;
  if (mock_script) {
    model::MockScript script = model::load_mock_script(mock_script->string());
    set.clients.planner = keep(set, std::make_unique<model::MockClient>(config.planner.name, script.planner));
    set.clients.coder = keep(set, std::make_unique<model::MockClient>(config.coder.name, script.coder));
    set.clients.qa = keep(set, std::make_unique<model::MockClient>(config.qa.name, script.qa));
    set.eval = keep(set, std::make_unique<model::MockClient>(config.eval.name, script.eval));
    for (const model::ModelEndpoint& e : config.judge_pool) {
      set.clients.judge_pool.push_back(keep(set, std::make_unique<model::MockClient>(e.name, script.judges[e.name])));
    }
    return set;
  }
  model::HttpOptions options;
  if (audit) options.audit_path = *audit;
  auto http = [&](const model::ModelEndpoint& e) {
    return keep(set, std::make_unique<model::HttpChatClient>(e, options));
  };
  set.clients.planner = http(config.planner);
  set.clients.coder = http(config.coder);
  set.clients.qa = http(config.qa);
  set.eval = http(config.eval);
  for (const model::ModelEndpoint& e : config.judge_pool) set.clients.judge_pool.push_back(http(e));
  return set;
}

std::optional<fs::path> mock_path(bool mock, const std::string& mock_script, const pipeline::PipelineConfig& config) {
  if (!mock_script.empty()) return fs::path(mock_script);
  if (!mock) return std::nullopt;
  if (!config.mock_script) throw pipeline::ConfigError("--mock given but the config sets no mock_script");
  return config.mock_script;
}

std::string slurp(const fs::path& p) {
  try {
    return refine::read_text_file(p);
  } catch (const std::exception& e) {
    throw pipeline::ConfigError(e.what());
  }
}

struct GenerateArgs {
  std::string config;
  bool mock = false;
  std::string mock_script;
  bool no_kp = false, no_cp = false, no_early_stop = false, resume = false, transcripts = false;
  std::optional<int> workers, variations;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> ideas;
  std::optional<std::string> audit, out;
};

int run_generate(const GenerateArgs& args) {
  pipeline::PipelineConfig config = pipeline::load_config(args.config);
  if (args.no_kp) config.knowledge_planning = false;
  if (args.no_cp) config.code_planning = false;
  if (args.no_early_stop) config.early_stop = false;
  if (args.workers) config.workers = *args.workers;
  if (args.variations) config.variations = *args.variations;
  if (args.seed) config.base_seed = *args.seed;
  if (args.ideas) config.ideas = *args.ideas;
  if (args.out) config.output_dir = *args.out;
  config.validate();

  const pipeline::DomainAssets assets = pipeline::load_assets(config);
  const auto mock = mock_path(args.mock, args.mock_script, config);
  ClientSet set = make_clients(config, mock, args.audit);

  std::unique_ptr<dedup::DedupStore> store;
  const fs::path store_path = config.output_dir / "store.jsonl";
  if (args.resume && fs::exists(store_path)) {
    store = dedup::DedupStore::load(store_path, config.dedup_threshold);
    spdlog::info("resuming with {} admitted programs", store->size());
  } else {
    store = std::make_unique<dedup::DedupStore>(config.dedup_threshold);
  }

  model::UsageLedger ledger;
  pipeline::RunOptions options;
  options.sequential = mock.has_value();
  pipeline::RunResult result;
  try {
    result = pipeline::run_domain(config, assets, set.clients, *store, ledger, options);
  } catch (const refine::FailedParseLimit& e) {
    spdlog::error("{}", e.what());
    return kExitZeroYield;
  }

  nlohmann::ordered_json info;
  info["domain"] = config.domain_name;
  info["base_seed"] = config.base_seed;
  info["variations"] = config.variations;
  info["ideas"] = config.ideas;
  info["knowledge_planning"] = config.knowledge_planning;
  info["code_planning"] = config.code_planning;
  info["early_stop"] = config.early_stop;
  pipeline::emit_dataset(result.records, result.metrics, info, config.output_dir);
  store->save(store_path);
  if (args.transcripts) {
    const fs::path dir = config.output_dir / "transcripts";
    fs::create_directories(dir);
    for (const pipeline::CandidateResult& c : result.candidates) {
      if (!c.state) continue;
      std::ofstream out(dir / fmt::format("candidate_{:03}.jsonl", c.index + 1), std::ios::binary);
      out << refine::transcript_jsonl(c.state->transcript);
    }
  }

  const pipeline::RunMetrics& m = result.metrics;
  fmt::print("attempted {} compiled {} admitted {} records {}\n", m.attempted, m.compiled, m.admitted, m.records);
  if (m.attempted > 0) fmt::print("{}\n", pipeline::metrics_table(m));
  return m.admitted == 0 ? kExitZeroYield : kExitOk;
}

int run_layout(const std::string& domain, const std::string& style, const std::string& substance,
               std::uint64_t seed, const std::string& out, const pipeline::PipelineConfig* config) {
  const dsl::DomainSchema schema = dsl::parse_domain(slurp(domain));
  const dsl::StyleSheet sheet = dsl::parse_style(slurp(style), schema);
  const dsl::SubstanceProgram program = dsl::parse_substance(slurp(substance), schema);
  const layout::SolverSettings settings = config ? config->solver : layout::SolverSettings{};
  const layout::Diagram d = render::place_labels(layout::layout(program, sheet, schema, seed, settings));
  const std::string svg = render::render_svg(d);
  if (out.empty() || out == "-") {
    std::cout << svg;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw pipeline::ConfigError("cannot write " + out);
    f << svg;
  }
  fmt::print(stderr, "converged {} rounds {} energy {:.6g} penalty {:.3g}\n", d.meta.converged, d.meta.outer_rounds,
             d.meta.total_energy, d.meta.total_penalty);
  return kExitOk;
}

int run_dedup_check(const std::string& store_path, const std::string& domain, const std::string& substance,
                    std::size_t threshold) {
  const dsl::DomainSchema schema = dsl::parse_domain(slurp(domain));
  const dsl::SubstanceProgram program = dsl::parse_substance(slurp(substance), schema);
  auto store = dedup::DedupStore::load(store_path, threshold);
  const auto nearest = store->nearest(program);
  const bool admit = store->should_admit(program);
  fmt::print("{} (entries {}, nearest distance {}, threshold {})\n", admit ? "admit" : "reject", store->size(),
             nearest ? std::to_string(*nearest) : "none", threshold);
  return kExitOk;
}

int run_qa(const std::string& config_path, const std::string& dataset, bool mock, const std::string& mock_script,
           const std::optional<std::string>& audit) {
  const pipeline::PipelineConfig config = pipeline::load_config(config_path);
  const pipeline::DomainAssets assets = pipeline::load_assets(config);
  ClientSet set = make_clients(config, mock_path(mock, mock_script, config), audit);
  std::vector<pipeline::DatasetRecord> records = pipeline::read_dataset(dataset);
  model::UsageLedger ledger;
  std::map<std::string, std::vector<qa::MCQItem>> past;
  std::map<std::string, std::uint64_t> ordinal;
  std::size_t questions = 0;
  for (pipeline::DatasetRecord& r : records) {
    const dsl::SubstanceProgram program = dsl::parse_substance(r.substance, assets.schema);
    const std::uint64_t p = ordinal.emplace(r.program_id, ordinal.size()).first->second;
    pipeline::annotate_record(r, program, config, assets, set.clients.qa, past[r.program_id],
                              (p << 32) ^ (r.seed * 16), ledger);
    questions += r.qa_items.size();
  }
  pipeline::write_dataset_jsonl(records, dataset);
  fmt::print("records {} questions {}\n", records.size(), questions);
  return kExitOk;
}

int run_eval(const std::string& config_path, const std::string& input, bool mock, const std::string& mock_script,
             const std::optional<std::string>& audit) {
  const pipeline::PipelineConfig config = pipeline::load_config(config_path);
  ClientSet set = make_clients(config, mock_path(mock, mock_script, config), audit);
  const refine::PromptLibrary lib =
      config.prompt_dir.empty() ? refine::PromptLibrary::bundled() : refine::PromptLibrary(config.prompt_dir);
  const std::string tmpl = lib.get("evaluation");
  const std::vector<qa::EvalItem> items = qa::parse_eval_jsonl(slurp(input));
  const fs::path base = fs::absolute(input).parent_path();
  const qa::ImageLoader load = [&](const std::string& p) {
    const fs::path path(p);
    return refine::read_text_file(path.is_absolute() ? path : base / path);
  };
  const qa::EvalReport report = qa::evaluate(items, *set.eval, tmpl, load);
  fmt::print("{}\n{}\n", qa::accuracy_header(report), qa::accuracy_row(report));
  return kExitOk;
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw pipeline::ConfigError(fmt::format("bad number '{}' in vector", item));
    }
  }
  return v;
}

int run_metrics(const std::string& manifest, const std::vector<std::string>& cosine) {
  if (!cosine.empty()) {
    const std::vector<double> u = parse_vector(cosine.at(0));
    const std::vector<double> v = parse_vector(cosine.at(1));
    fmt::print("cosine {:.6f}\n", pipeline::cosine_similarity(u, v));
    return kExitOk;
  }
  const nlohmann::json j = nlohmann::json::parse(slurp(manifest));
  const pipeline::RunMetrics m = pipeline::metrics_from_json(j.at("metrics"));
  fmt::print("attempted {} compiled {} admitted {}\n", m.attempted, m.compiled, m.admitted);
  if (m.attempted > 0) fmt::print("{}\n", pipeline::metrics_table(m));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scientific diagram and question synthesis"};
  app.require_subcommand(1);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.add_flag("-q,--quiet", quiet, "Errors only");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Run the full pipeline for one domain");
  generate->add_option("-c,--config", gen.config, "Pipeline config file")->required();
  generate->add_flag("--mock", gen.mock, "Use the config's scripted clients");
  generate->add_option("--mock-script", gen.mock_script, "Scripted clients file (implies --mock)");
  generate->add_flag("--no-knowledge-planning", gen.no_kp, "Skip idea enumeration");
  generate->add_flag("--no-code-planning", gen.no_cp, "Skip the planning turn");
  generate->add_flag("--no-early-stop", gen.no_early_stop, "Run every refine round, keep the best program");
  generate->add_option("--workers", gen.workers, "Worker threads (0: hardware threads)")->check(CLI::NonNegativeNumber);
  generate->add_option("--audit", gen.audit, "Append every HTTP attempt to this JSONL file");
  generate->add_option("--out", gen.out, "Output directory");
  generate->add_option("--seed", gen.seed, "Base seed");
  generate->add_option("--variations", gen.variations, "Layouts per admitted program")->check(CLI::PositiveNumber);
  generate->add_option("--ideas", gen.ideas, "Ideas requested from the planner")->check(CLI::PositiveNumber);
  generate->add_flag("--resume", gen.resume, "Load store.jsonl from the output directory");
  generate->add_flag("--transcripts", gen.transcripts, "Write refine transcripts");

  std::string lay_domain, lay_style, lay_substance, lay_out, lay_config;
  std::uint64_t lay_seed = 0;
  auto* lay = app.add_subcommand("layout", "Lay out one program and write SVG");
  lay->add_option("--domain", lay_domain, ".domain file")->required();
  lay->add_option("--style", lay_style, ".style file")->required();
  lay->add_option("--substance", lay_substance, ".substance file")->required();
  lay->add_option("--seed", lay_seed, "Layout seed");
  lay->add_option("-o,--out", lay_out, "SVG path (default stdout)");
  lay->add_option("-c,--config", lay_config, "Take solver settings from this config");

  std::string dd_store, dd_domain, dd_substance;
  std::size_t dd_threshold = 2;
  auto* dd = app.add_subcommand("dedup-check", "Would a program be admitted to a store?");
  dd->add_option("--store", dd_store, "store.jsonl")->required();
  dd->add_option("--domain", dd_domain, ".domain file")->required();
  dd->add_option("--substance", dd_substance, ".substance file")->required();
  dd->add_option("-T,--threshold", dd_threshold, "Minimum line distance")->check(CLI::PositiveNumber);

  std::string qa_config, qa_dataset, qa_mock_script;
  bool qa_mock = false;
  std::optional<std::string> qa_audit;
  auto* qa_cmd = app.add_subcommand("qa", "Regenerate questions for an existing dataset");
  qa_cmd->add_option("-c,--config", qa_config, "Pipeline config file")->required();
  qa_cmd->add_option("--dataset", qa_dataset, "Dataset directory")->required();
  qa_cmd->add_flag("--mock", qa_mock, "Use the config's scripted clients");
  qa_cmd->add_option("--mock-script", qa_mock_script, "Scripted clients file");
  qa_cmd->add_option("--audit", qa_audit, "HTTP audit JSONL");

  std::string ev_config, ev_input, ev_mock_script;
  bool ev_mock = false;
  std::optional<std::string> ev_audit;
  auto* ev = app.add_subcommand("eval", "Accuracy of the [eval] model on a question file");
  ev->add_option("-c,--config", ev_config, "Pipeline config file")->required();
  ev->add_option("--input", ev_input, "JSONL of subject, image, question, options, key")->required();
  ev->add_flag("--mock", ev_mock, "Use the config's scripted clients");
  ev->add_option("--mock-script", ev_mock_script, "Scripted clients file");
  ev->add_option("--audit", ev_audit, "HTTP audit JSONL");

  std::string mt_manifest;
  std::vector<std::string> mt_cosine;
  auto* mt = app.add_subcommand("metrics", "Rates from a manifest, or cosine similarity");
  mt->add_option("manifest", mt_manifest, "manifest.json");
  mt->add_option("--cosine", mt_cosine, "Two comma-separated vectors")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  auto logger = spdlog::stderr_color_mt("diagen");
  spdlog::set_default_logger(logger);
  spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::err : spdlog::level::info);

  try {
    if (*generate) return run_generate(gen);
    if (*lay) {
      std::optional<pipeline::PipelineConfig> cfg;
      if (!lay_config.empty()) cfg = pipeline::load_config(lay_config);
      return run_layout(lay_domain, lay_style, lay_substance, lay_seed, lay_out, cfg ? &*cfg : nullptr);
    }
    if (*dd) return run_dedup_check(dd_store, dd_domain, dd_substance, dd_threshold);
    if (*qa_cmd) return run_qa(qa_config, qa_dataset, qa_mock, qa_mock_script, qa_audit);
    if (*ev) return run_eval(ev_config, ev_input, ev_mock, ev_mock_script, ev_audit);
    if (*mt) {
      if (mt_manifest.empty() && mt_cosine.empty()) throw pipeline::ConfigError("give a manifest or --cosine");
      return run_metrics(mt_manifest, mt_cosine);
    }
  } catch (const pipeline::ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kExitConfig;
  } catch (const dsl::ParseError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const layout::CompileError& e) {
    spdlog::error("compile: {}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
