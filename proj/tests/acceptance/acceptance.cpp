// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "diagen/dedup/store.hpp"
#include "diagen/dsl/domain.hpp"
#include "diagen/dsl/style.hpp"
#include "diagen/dsl/substance.hpp"
#include "diagen/layout/compile.hpp"
#include "diagen/layout/diagram.hpp"
#include "diagen/model/mock.hpp"
#include "diagen/pipeline/config.hpp"
#include "diagen/pipeline/metrics.hpp"
#include "diagen/pipeline/run.hpp"
#include "diagen/qa/eval.hpp"
#include "diagen/qa/mcq.hpp"
#include "diagen/refine/loop.hpp"
#include "diagen/refine/prompts.hpp"
#include "diagen/refine/verdict.hpp"
#include "diagen/render/svg.hpp"
#include "generators.hpp"
#include "geometry_oracle.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace diagen;
using testing::Rng;
using Clock = std::chrono::steady_clock;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------
// 1. exterior-point analytic oracle

Result exterior_oracle() {
  const auto t0 = Clock::now();
  layout::LayoutProblem p;
  p.add_slot(layout::SlotRole::X);
  layout::Term energy;
  energy.custom = [](layout::ad::Graph&, std::span<const layout::ad::Var> x) { return layout::ad::square(x[0] - 3.0); };
  layout::Term penalty;  // P = max(0, x - 1); the objective squares it
  penalty.custom = [](layout::ad::Graph&, std::span<const layout::ad::Var> x) { return layout::ad::max0(x[0] - 1.0); };
  p.energies.push_back(energy);
  p.penalties.push_back(penalty);

  const layout::SolverSettings settings;
  const layout::SolveResult r = layout::solve_exterior(p, {0.0}, settings);
  const double x = r.params[0];

  // min (x-3)^2 + c (x-1)^2 on x > 1 gives x = (3 + c) / (1 + c).
  const double c = 10.0;
  const double closed_form = (3.0 + c) / (1.0 + c);
  const layout::LbfgsResult inner = layout::minimize_at_stiffness(p, {0.0}, c, settings);
  const double inner_err = std::abs(inner.x[0] - closed_form);
  const double secs = seconds_since(t0);

  const bool ok = std::abs(x - 1.0) <= 1e-3 && r.converged && inner_err <= 1e-6 && secs < 1.0;
  return {ok, fmt::format("x_final={:.7f} converged={} rounds={} | c=10 inner x={:.9f} (13/11 err {:.2e}) | {:.3f}s",
                          x, r.converged, r.outer_rounds, inner.x[0], inner_err, secs)};
}

// ---------------------------------------------------------------------------
// 2. gradient suite

double objective_value(const layout::LayoutProblem& p, std::span<const double> x, double c) {
  double f = 0.0;
  for (const auto& t : p.energies) f += layout::eval_energy(p, t, x);
  for (const auto& t : p.penalties) {
    const double v = layout::eval_penalty(p, t, x);
    f += c * v * v;
  }
  return f;
}

Result gradient_suite() {
  const auto t0 = Clock::now();
  constexpr double h = 1e-5;
  double worst = 0.0;
  int max_params = 0;
  std::size_t worst_case = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    Rng rng(0x5eed0000 + i);
    testing::RandomProblem rp = testing::random_layout_problem(rng, 20);
    max_params = std::max(max_params, rp.problem.param_count);
    const std::vector<double> g = layout::gradient(rp.problem, rp.x, rp.stiffness);

    std::vector<double> fd(rp.x.size());
    for (std::size_t k = 0; k < rp.x.size(); ++k) {
      std::vector<double> xp = rp.x, xm = rp.x;
      xp[k] += h;
      xm[k] -= h;
      fd[k] = (objective_value(rp.problem, xp, rp.stiffness) - objective_value(rp.problem, xm, rp.stiffness)) / (2 * h);
    }
    // Relative error of the gradient vector: max |g - fd| over max(|g|, |fd|, 1).
    double diff = 0.0, scale = 1.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      diff = std::max(diff, std::abs(g[k] - fd[k]));
      scale = std::max({scale, std::abs(g[k]), std::abs(fd[k])});
    }
    if (diff / scale > worst) {
      worst = diff / scale;
      worst_case = i;
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && max_params <= 20 && secs < 10.0,
          fmt::format("100 problems, <= {} params, max relative error {:.3e} (case {}) | {:.3f}s", max_params, worst,
                      worst_case, secs)};
}

// ---------------------------------------------------------------------------
// 3 and 4. constraint satisfaction and diversity over random programs

struct LayoutCorpus {
  std::vector<testing::GeoProgram> programs;
  std::vector<std::vector<layout::Diagram>> diagrams;  // [program][seed]
  double seconds = 0.0;
};

constexpr int kPrograms = 20;
constexpr int kSeeds = 10;
const double kOracleTol = std::sqrt(1e-5) + 1e-9;  // a single violation v has v^2 <= sum P

const LayoutCorpus& corpus() {
  static const LayoutCorpus c = [] {
    LayoutCorpus out;
    const auto t0 = Clock::now();
    const dsl::DomainSchema schema = dsl::parse_domain(testing::geo_domain_text());
    const dsl::StyleSheet style = dsl::parse_style(testing::geo_style_text(), schema);
    const layout::SolverSettings settings;
    for (int i = 0; i < kPrograms; ++i) {
      Rng rng(0xC0FFEE + static_cast<std::uint64_t>(i));
      out.programs.push_back(testing::random_geo_program(rng, 3, 10));
      const dsl::SubstanceProgram program = dsl::parse_substance(out.programs.back().source, schema);
      const layout::LayoutProblem problem = layout::compile(program, style, schema);
      std::vector<layout::Diagram> ds;
      for (int s = 0; s < kSeeds; ++s) ds.push_back(layout::layout_problem(problem, static_cast<std::uint64_t>(s), settings));
      out.diagrams.push_back(std::move(ds));
    }
    out.seconds = seconds_since(t0);
    return out;
  }();
  return c;
}

Result constraint_satisfaction() {
  const LayoutCorpus& c = corpus();
  int converged = 0, oracle_failures = 0, shapes_min = 100, shapes_max = 0;
  std::string first_failure;
  for (int i = 0; i < kPrograms; ++i) {
    const int n = static_cast<int>(c.programs[i].ids.size());
    shapes_min = std::min(shapes_min, n);
    shapes_max = std::max(shapes_max, n);
    for (const layout::Diagram& d : c.diagrams[i]) {
      if (!d.meta.converged || d.meta.total_penalty > 1e-5) continue;
      ++converged;
      const auto fails = testing::oracle_failures(d, c.programs[i].constraints(d), kOracleTol);
      if (!fails.empty()) {
        ++oracle_failures;
        if (first_failure.empty()) first_failure = fmt::format(" first: program {} seed {}: {}", i, d.meta.seed, fails[0]);
      }
    }
  }
  const double rate = static_cast<double>(converged) / (kPrograms * kSeeds);
  return {rate >= 0.95 && oracle_failures == 0 && c.seconds < 60.0,
          fmt::format("{} programs ({}-{} shapes) x {} seeds: {}/{} converged ({:.1f}%), {} oracle failures | {:.2f}s{}",
                      kPrograms, shapes_min, shapes_max, kSeeds, converged, kPrograms * kSeeds, 100 * rate,
                      oracle_failures, c.seconds, first_failure)};
}

double mean_center_distance(const layout::Diagram& a, const layout::Diagram& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.shapes.size(); ++k) {
    sum += std::hypot(a.shapes[k].cx - b.shapes[k].cx, a.shapes[k].cy - b.shapes[k].cy);
  }
  return sum / static_cast<double>(a.shapes.size());
}

Result layout_diversity() {
  const LayoutCorpus& c = corpus();
  int programs = 0, bad = 0;
  double smallest = 1e300;
  for (int i = 0; i < kPrograms; ++i) {
    std::vector<const layout::Diagram*> four;
    for (const layout::Diagram& d : c.diagrams[i]) {
      if (d.meta.converged && four.size() < 4) four.push_back(&d);
    }
    if (four.size() < 4) continue;
    ++programs;
    bool ok = true;
    for (std::size_t a = 0; a < 4; ++a) {
      ok = ok && testing::oracle_failures(*four[a], c.programs[i].constraints(*four[a]), kOracleTol).empty();
      for (std::size_t b = a + 1; b < 4; ++b) {
        const double dist = mean_center_distance(*four[a], *four[b]);
        smallest = std::min(smallest, dist);
        ok = ok && dist > 5.0;
      }
    }
    if (!ok) ++bad;
  }
  return {programs > 0 && bad == 0,
          fmt::format("{} programs with 4 converged seeds, {} failing; smallest pairwise mean center distance {:.2f}",
                      programs, bad, smallest)};
}

// ---------------------------------------------------------------------------
// 5. refine-loop traces

struct SetTheory {
  dsl::DomainSchema schema;
  dsl::StyleSheet style;
};

const SetTheory& set_theory() {
  static const SetTheory st = [] {
    const fs::path dir = fs::path(DIAGEN_DOMAIN_DIR) / "set-theory";
    SetTheory s;
    s.schema = dsl::parse_domain(slurp(dir / "sets.domain"));
    s.style = dsl::parse_style(slurp(dir / "sets.style"), s.schema);
    return s;
  }();
  return st;
}

std::string judge_reply(int good, const std::string& suggestion) {
  std::string out = "Comment: scripted\n\n";
  for (std::size_t k = 0; k < refine::kCriteriaCount; ++k) {
    out += fmt::format("{} Criterion Satisfied: {}\n", refine::criteria_names()[k],
                       static_cast<int>(k) < good ? "yes <GOOD>" : "no <BAD>");
  }
  return out + "\nSuggestions: " + suggestion;
}

struct Trace {
  refine::RefineState state;
  std::vector<std::size_t> coder_context_sizes;
  std::vector<std::size_t> judge_calls;
};

Trace run_trace(std::vector<std::string> coder_script, const std::vector<std::vector<std::string>>& judge_scripts,
                const refine::RefineSettings& settings) {
  const SetTheory& st = set_theory();
  model::MockClient coder("coder", std::move(coder_script));
  std::vector<std::unique_ptr<model::MockClient>> judges;
  std::vector<model::ChatClient*> ptrs;
  for (std::size_t k = 0; k < judge_scripts.size(); ++k) {
    judges.push_back(std::make_unique<model::MockClient>(fmt::format("j{}", k + 1), judge_scripts[k]));
    ptrs.push_back(judges.back().get());
  }
  refine::ParseFn parse = [&](const std::string& src) { return dsl::parse_substance(src, st.schema); };
  refine::RenderFn render = [&](const dsl::SubstanceProgram& p, std::uint64_t seed) {
    return render::render_svg(render::place_labels(layout::layout(p, st.style, st.schema, seed, {})));
  };
  Trace t;
  t.state = refine::iterative_visual_refine("initial prompt", settings, coder, ptrs, parse, render);
  for (const auto& call : coder.calls()) t.coder_context_sizes.push_back(call.size());
  for (const auto& j : judges) t.judge_calls.push_back(j->call_count());
  return t;
}

std::string roles(const std::vector<model::ChatMessage>& transcript) {
  std::string s;
  for (const auto& m : transcript) s += m.role == model::Role::User ? 'U' : 'A';
  return s;
}

std::vector<refine::RoundRecord::Status> statuses(const refine::RefineState& s) {
  std::vector<refine::RoundRecord::Status> out;
  for (const auto& r : s.history) out.push_back(r.status);
  return out;
}

Result refine_traces() {
  using S = refine::RoundRecord::Status;
  refine::RefineSettings settings;  // defaults: N_max = 8, theta = 0.85, early stop
  settings.intent = "sets";
  settings.judge_template = "{diagram_intent}\n{criterion}";
  const std::string good = "```\nSet A, B\nIsSubset(A, B)\nAutoLabel All\n```";
  std::vector<std::string> notes;
  bool ok = settings.max_rounds == 8 && settings.threshold == 0.85;

  {  // compile error, then a program every judge likes
    const std::string broken = "```\nSet A\nIsSubset(A, Q)\n```";
    const std::vector<std::string> all_good(1, judge_reply(7, "none"));
    Trace t = run_trace({broken, good}, {all_good, all_good, all_good}, settings);
    const auto& tr = t.state.transcript;
    const bool pass = t.state.outcome == refine::Outcome::Accepted && t.state.rounds == 2 && roles(tr) == "UAUA" &&
                      tr[0].text == "initial prompt" && tr[1].text == broken && tr[3].text == good &&
                      tr[2].text == refine::error_message(t.state.history[0].error) &&
                      tr[2].text.starts_with("Error: ") && statuses(t.state) == std::vector<S>{S::Failed, S::Scored} &&
                      t.state.last_score == 1.0 && t.state.last_source == "Set A, B\nIsSubset(A, B)\nAutoLabel All" &&
                      t.coder_context_sizes == std::vector<std::size_t>{1, 3} &&
                      t.judge_calls == std::vector<std::size_t>{1, 1, 1};
    notes.push_back(fmt::format("error->accept {} ({} rounds, {})", pass ? "ok" : "MISMATCH", t.state.rounds, roles(tr)));
    ok = ok && pass;
  }
  {  // 17/21 below theta, then 19/21 above
    Trace t = run_trace({good, good},
                        {{judge_reply(6, "s1"), judge_reply(7, "s2")},
                         {judge_reply(6, "s1"), judge_reply(6, "s2")},
                         {judge_reply(5, "s1"), judge_reply(6, "s2")}},
                        settings);
    const auto& tr = t.state.transcript;
    const bool pass =
        t.state.outcome == refine::Outcome::Accepted && t.state.rounds == 2 && roles(tr) == "UAUA" &&
        tr[2].text == refine::suggestion_message(17.0 / 21.0, 0.85, "j1: s1\nj2: s1\nj3: s1") &&
        statuses(t.state) == std::vector<S>{S::Scored, S::Scored} &&
        std::abs(*t.state.history[0].score - 17.0 / 21.0) < 1e-12 &&
        std::abs(*t.state.last_score - 19.0 / 21.0) < 1e-12 && t.coder_context_sizes == std::vector<std::size_t>{1, 3} &&
        t.judge_calls == std::vector<std::size_t>{2, 2, 2};
    notes.push_back(fmt::format("below->above {} ({} rounds, {})", pass ? "ok" : "MISMATCH", t.state.rounds, roles(tr)));
    ok = ok && pass;
  }
  {  // every round at 4/7: N_max rounds, feedback after each
    const std::vector<std::string> low(8, judge_reply(4, "more space"));
    Trace t = run_trace(std::vector<std::string>(8, good), {low, low, low}, settings);
    const auto& tr = t.state.transcript;
    std::string expect_roles = "U";
    std::vector<std::size_t> expect_ctx;
    for (int n = 0; n < 8; ++n) {
      expect_roles += "AU";
      expect_ctx.push_back(1 + 2 * static_cast<std::size_t>(n));
    }
    const bool pass = t.state.outcome == refine::Outcome::Exhausted && t.state.rounds == 8 &&
                      roles(tr) == expect_roles && statuses(t.state) == std::vector<S>(8, S::Scored) &&
                      t.coder_context_sizes == expect_ctx && t.judge_calls == std::vector<std::size_t>{8, 8, 8} &&
                      std::abs(*t.state.last_score - 4.0 / 7.0) < 1e-12;
    notes.push_back(fmt::format("exhaustion {} ({} rounds, {} messages)", pass ? "ok" : "MISMATCH", t.state.rounds,
                                tr.size()));
    ok = ok && pass;
  }
  return {ok, fmt::format("{}", fmt::join(notes, "; "))};
}

// ---------------------------------------------------------------------------
// 6. dedup oracle

Result dedup_oracle() {
  const SetTheory& st = set_theory();
  auto parse = [&](const std::string& s) { return dsl::parse_substance(s, st.schema); };
  Rng rng(0xDED0);

  int mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    const std::string a = testing::random_set_program(rng);
    std::string b;
    switch (rng.between(0, 2)) {
      case 0: b = testing::random_set_program(rng); break;
      case 1: b = testing::permute_lines(rng, a); break;
      default: b = a + testing::random_set_program(rng, 1, 1); break;
    }
    dsl::SubstanceProgram pa, pb;
    try {
      pa = parse(a);
      pb = parse(b);
    } catch (const std::exception&) {
      pb = parse(testing::permute_lines(rng, a));
    }
    if (dedup::line_distance(pa, pb) !=
        testing::full_table_distance(testing::sorted_statements(pa), testing::sorted_statements(pb))) {
      ++mismatches;
    }
  }

  dedup::DedupStore store(2);
  int admitted = 0, wrong_decisions = 0;
  std::vector<dsl::SubstanceProgram> kept;
  for (int i = 0; i < 100; ++i) {
    const dsl::SubstanceProgram p = parse(testing::random_set_program(rng, 6, 6));
    std::size_t nearest = SIZE_MAX;
    for (const auto& e : store.entries()) {
      nearest = std::min(nearest, testing::full_table_distance(testing::sorted_statements(p), e.lines));
    }
    const bool admit = store.try_admit(p).has_value();
    if (admit != (nearest == SIZE_MAX || nearest >= 2)) ++wrong_decisions;
    if (admit) {
      ++admitted;
      kept.push_back(p);
    }
  }
  const auto entries = store.entries();
  int invariant_breaks = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      if (testing::full_table_distance(entries[i].lines, entries[j].lines) < store.threshold()) ++invariant_breaks;
    }
  }

  int permuted_admitted = 0, permuted_total = 0;
  for (std::size_t threshold : {1, 2, 3, 5}) {
    dedup::DedupStore s(threshold);
    for (const auto& p : kept) {
      s.try_admit(p);
    }
    for (const auto& e : s.entries()) {
      std::string text;
      for (const auto& l : e.lines) text += l + "\n";
      ++permuted_total;
      if (s.should_admit(parse(testing::permute_lines(rng, text)))) ++permuted_admitted;
    }
  }
  const bool ok = mismatches == 0 && invariant_breaks == 0 && wrong_decisions == 0 && permuted_admitted == 0;
  return {ok, fmt::format("500 pairs: {} distance mismatches | 100 admissions ({} kept): {} pairs below T, {} wrong "
                          "decisions | {} permuted duplicates, {} admitted",
                          mismatches, admitted, invariant_breaks, wrong_decisions, permuted_total, permuted_admitted)};
}

// ---------------------------------------------------------------------------
// 7. metric formulas

pipeline::PipelineConfig set_theory_config() {
  return pipeline::load_config(fs::path(DIAGEN_DOMAIN_DIR) / "set-theory" / "config.toml");
}

Result metric_formulas() {
  pipeline::PipelineConfig config = set_theory_config();
  config.ideas = 200;
  config.knowledge_planning = false;
  config.code_planning = false;
  config.max_rounds = 1;
  config.variations = 1;
  config.qa_per_diagram = 0;
  config.judges_per_round = 1;
  config.workers = 4;
  const pipeline::DomainAssets assets = pipeline::load_assets(config);

  // Candidates 0, 5, ..., 170 (35 of them) reply without a program.
  std::vector<std::string> coder_script;
  int compiled = 0;
  for (int i = 0; i < 200; ++i) {
    if (i % 5 == 0 && i / 5 < 35) {
      coder_script.push_back("I am not able to draw this one.");
    } else {
      coder_script.push_back(fmt::format("```\nSet P{0}, Q{0}\nDisjoint(P{0}, Q{0})\n```", i));
      ++compiled;
    }
  }
  model::MockClient coder("coder", coder_script);
  std::vector<std::unique_ptr<model::MockClient>> judges;
  pipeline::Clients clients;
  clients.coder = &coder;
  for (const auto& e : config.judge_pool) {
    judges.push_back(std::make_unique<model::MockClient>(e.name, std::vector<std::string>(200, judge_reply(7, "none"))));
    clients.judge_pool.push_back(judges.back().get());
  }
  dedup::DedupStore store(config.dedup_threshold);
  model::UsageLedger ledger;
  pipeline::RunOptions options;
  options.sequential = true;
  const pipeline::RunResult r = pipeline::run_domain(config, assets, clients, store, ledger, options);

  const double cr = pipeline::compile_rate(r.metrics);
  const double yr = pipeline::yield_rate(r.metrics);
  const std::vector<double> u = {1, 2, 3}, v = {4, 5, 6};
  const double cos = pipeline::cosine_similarity(u, v);
  const double cos_oracle = 32.0 / std::sqrt(14.0 * 77.0);
  const bool ok = compiled == 165 && r.metrics.attempted == 200 && r.metrics.compiled == 165 &&
                  r.metrics.admitted == 165 && std::abs(cr - 0.825) < 1e-12 && std::abs(yr - 0.825) < 1e-12 &&
                  std::abs(cos - 0.9746) <= 1e-4 && std::abs(cos - cos_oracle) < 1e-12;
  return {ok, fmt::format("attempted {} compiled {} admitted {} -> compile_rate {:.4f} yield_rate {:.4f} | cosine {:.6f}",
                          r.metrics.attempted, r.metrics.compiled, r.metrics.admitted, cr, yr, cos)};
}

// ---------------------------------------------------------------------------
// 8. parser fixtures

Result parser_fixtures() {
  const auto fx = nlohmann::json::parse(slurp(fs::path(DIAGEN_TEST_DATA) / "parser_fixtures.json"));
  int total = 0, wrong = 0;
  std::string first;
  auto miss = [&](const std::string& what) {
    ++wrong;
    if (first.empty()) first = " first: " + what;
  };

  for (const auto& c : fx["verdicts"]) {
    ++total;
    const refine::JudgeVerdict v = refine::parse_verdict(c["input"].get<std::string>());
    std::vector<bool> got(v.criteria.begin(), v.criteria.end());
    if (got != c["expected"]["criteria"].get<std::vector<bool>>() ||
        v.suggestion != c["expected"]["suggestion"].get<std::string>()) {
      miss("verdict " + c["input"].get<std::string>().substr(0, 30));
    }
  }
  for (const auto& c : fx["mcq"]) {
    ++total;
    const auto& e = c["expected"];
    try {
      const qa::McqFields f = qa::parse_mcq(c["input"].get<std::string>());
      const std::vector<std::string> options(f.options.begin(), f.options.end());
      if (e.is_null() || f.question != e["question"] || options != e["options"].get<std::vector<std::string>>() ||
          std::string(1, f.answer_key) != e["answer"] || std::string(qa::to_string(f.category)) != e["category"] ||
          f.rationale != e["rationale"]) {
        miss("mcq " + c["input"].get<std::string>().substr(0, 30));
      }
    } catch (const qa::McqParseError&) {
      if (!e.is_null()) miss("mcq rejected " + c["input"].get<std::string>().substr(0, 30));
    }
  }
  for (const auto& c : fx["answer_letters"]) {
    ++total;
    const std::optional<std::string> got = qa::parse_answer_letter(c["input"].get<std::string>());
    const bool match = c["expected"].is_null() ? !got.has_value() : (got && *got == c["expected"].get<std::string>());
    if (!match) miss("answer " + c["input"].get<std::string>());
  }
  const bool headline = qa::parse_answer_letter("Answer: (C) 1") == std::optional<std::string>("C");
  return {wrong == 0 && headline && total > 0,
          fmt::format("{} fixtures, {} mismatches; \"Answer: (C) 1\" -> {}{}", total, wrong,
                      qa::parse_answer_letter("Answer: (C) 1").value_or("none"), first)};
}

// ---------------------------------------------------------------------------
// 9. end-to-end CLI

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return files;
}

Result end_to_end() {
  const auto t0 = Clock::now();
  const fs::path base = fs::temp_directory_path() / fmt::format("diagen-acceptance-{}", ::getpid());
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path config = fs::path(DIAGEN_DOMAIN_DIR) / "set-theory" / "config.toml";
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* name : {"run1", "run2"}) {
    const std::string cmd = fmt::format("\"{}\" -q generate -c \"{}\" --mock --out \"{}\" > \"{}\" 2>&1", DIAGEN_CLI_PATH,
                                        config.string(), (base / name).string(), (base / (std::string(name) + ".log")).string());
    if (std::system(cmd.c_str()) != 0) {
      return {false, fmt::format("generate failed: {}", slurp(base / (std::string(name) + ".log")))};
    }
    runs.push_back(tree(base / name));
  }
  const double secs = seconds_since(t0);

  const auto manifest = nlohmann::json::parse(runs[0].at("manifest.json"));
  const std::size_t admitted = manifest["metrics"]["admitted"].get<std::size_t>();
  const std::size_t variations = set_theory_config().variations;
  std::size_t records = 0;
  std::istringstream lines(runs[0].at("dataset.jsonl"));
  for (std::string l; std::getline(lines, l);) records += l.empty() ? 0 : 1;

  std::size_t svgs = 0, malformed = 0;
  std::string xml_error;
  for (const auto& [path, text] : runs[0]) {
    if (!path.ends_with(".svg")) continue;
    ++svgs;
    if (!testing::xml_well_formed(text, &xml_error)) ++malformed;
  }
  fs::remove_all(base);
  const bool identical = runs[0] == runs[1];
  const bool ok = identical && admitted > 0 && records == admitted * variations && svgs == records && malformed == 0 &&
                  secs < 30.0;
  return {ok, fmt::format("{} files, identical={} | admitted {} x variations {} = {} records | {} svgs, {} malformed | "
                          "{:.2f}s for two runs",
                          runs[0].size(), identical, admitted, variations, records, svgs, malformed, secs)};
}

// ---------------------------------------------------------------------------
// 10. QA round trip

Result qa_round_trip() {
  const std::string format = refine::PromptLibrary::bundled().get("qa_format");
  Rng rng(0x9A);
  int different = 0;
  std::string first;
  for (int i = 0; i < 200; ++i) {
    qa::MCQItem item{testing::random_mcq_fields(rng), fmt::format("p{:05d}", i), rng.engine()()};
    const std::string text = qa::render_mcq(format, item.fields);
    qa::MCQItem back{qa::McqFields{}, item.program_id, item.seed};
    try {
      back.fields = qa::parse_mcq(text);
    } catch (const std::exception& e) {
      back.fields = {};
    }
    if (!(back == item)) {
      ++different;
      if (first.empty()) first = " first:\n" + text;
    }
  }
  return {different == 0, fmt::format("200 items, {} differ after render/parse{}", different, first)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> checks = {
      {"exterior-point analytic oracle", exterior_oracle},
      {"gradient suite", gradient_suite},
      {"constraint satisfaction", constraint_satisfaction},
      {"layout diversity", layout_diversity},
      {"refine-loop traces", refine_traces},
      {"dedup oracle", dedup_oracle},
      {"metric formulas", metric_formulas},
      {"parser fixtures", parser_fixtures},
      {"end-to-end mocked pipeline", end_to_end},
      {"QA round trip", qa_round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Result r;
    try {
      r = checks[i].second();
    } catch (const std::exception& e) {
      r = {false, fmt::format("exception: {}", e.what())};
    }
    if (!r.pass) ++failed;
    fmt::print("{} [{:2}] {}: {}\n", r.pass ? "PASS" : "FAIL", i + 1, checks[i].first, r.detail);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", checks.size() - static_cast<std::size_t>(failed), checks.size());
  return failed == 0 ? 0 : 1;
}
