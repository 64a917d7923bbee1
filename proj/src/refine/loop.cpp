#include "diagen/refine/loop.hpp"

#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "diagen/refine/extract.hpp"
#include "diagen/refine/prompts.hpp"

namespace diagen::refine {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Accepted: return "accepted";
    case Outcome::Exhausted: return "exhausted";
    case Outcome::FailedParseLimit: return "failed-parse-limit";
  }
  return "?";
}

void RefineSettings::validate() const {
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must lie in (0, 1]");
}

std::string reminder_message() {
  return "No Substance program was found in your reply. Reply with the complete program inside a "
         "single ``` fenced code block.";
}

std::string error_message(std::string_view what) {
  return fmt::format("Error: {}\nFix the program and reply with the complete corrected program inside a "
                     "``` fenced code block.",
                     what);
}

std::string suggestion_message(double score, double threshold, std::string_view suggestions) {
  return fmt::format("The judges scored the diagram {:.3f} (needed {:.3f}).\nSuggestions:\n{}\n"
                     "Revise the program and reply with the complete program inside a ``` fenced code block.",
                     score, threshold, suggestions);
}

std::string judge_prompt(const RefineSettings& s) {
  return fill_template(s.judge_template, {{"diagram_intent", s.intent}, {"criterion", s.criteria_text}});
}

RefineState iterative_visual_refine(const std::string& initial_prompt, const RefineSettings& settings,
                                    model::ChatClient& coder, std::span<model::ChatClient* const> judges,
                                    const ParseFn& parse, const RenderFn& render,
                                    model::UsageLedger* ledger) {
  settings.validate();
  if (judges.empty()) throw std::invalid_argument("at least one judge is required");

  RefineState st;
  st.transcript.push_back(model::ChatMessage::user(initial_prompt));
  const std::string judge_text = judge_prompt(settings);
  bool any_scored = false;

  auto call = [&](model::ChatClient& client, std::span<const model::ChatMessage> messages) {
    model::Completion c = model::complete_recorded(client, messages, ledger);
    st.usage += c.usage;
    return c.text;
  };

  for (int n = 1; n <= settings.max_rounds; ++n) {
    st.rounds = n;
    const std::string reply = call(coder, st.transcript);
    st.transcript.push_back(model::ChatMessage::assistant(reply));
    RoundRecord rec;
    rec.round = n;

    const std::optional<std::string> source = extract_program(reply);
    if (!source) {
      st.history.push_back(rec);
      st.transcript.push_back(model::ChatMessage::user(reminder_message()));
      continue;
    }

    dsl::SubstanceProgram program;
    std::vector<std::string> diagrams;
    try {
      program = parse(*source);
      for (std::size_t k = 0; k < judges.size(); ++k) {
        diagrams.push_back(render(program, settings.base_seed + k));
      }
    } catch (const std::exception& e) {
      rec.status = RoundRecord::Status::Failed;
      rec.error = e.what();
      st.history.push_back(rec);
      st.transcript.push_back(model::ChatMessage::user(error_message(e.what())));
      continue;
    }

    std::vector<JudgeVerdict> verdicts;
    for (std::size_t k = 0; k < judges.size(); ++k) {
      const std::vector<model::ChatMessage> ask = {
          model::ChatMessage::user(judge_text, {model::ImagePart{"image/svg+xml", diagrams[k]}})};
      verdicts.push_back(parse_verdict(call(*judges[k], ask), judges[k]->name()));
    }
    const Aggregate agg = aggregate(verdicts);
    rec.status = RoundRecord::Status::Scored;
    rec.score = agg.score;
    st.history.push_back(rec);
    spdlog::debug("refine round {}: score {:.3f}", n, agg.score);

    const bool better = !any_scored || agg.score > *st.last_score;
    if (settings.early_stop || better) {
      st.last_program = program;
      st.last_source = *source;
      st.last_score = agg.score;
      st.last_verdicts = verdicts;
    }
    any_scored = true;

    if (settings.early_stop && agg.score >= settings.threshold) {
      st.outcome = Outcome::Accepted;
      return st;
    }
    st.transcript.push_back(
        model::ChatMessage::user(suggestion_message(agg.score, settings.threshold, agg.suggestions)));
  }

  if (!any_scored) {
    st.outcome = Outcome::FailedParseLimit;
  } else if (*st.last_score >= settings.threshold) {
    st.outcome = Outcome::Accepted;  // only reachable with early_stop off
  } else {
    st.outcome = Outcome::Exhausted;
  }
  return st;
}

std::string transcript_jsonl(std::span<const model::ChatMessage> transcript) {
  std::string out;
  for (const model::ChatMessage& m : transcript) {
    nlohmann::json j = {{"role", model::to_string(m.role)}, {"text", m.text}, {"images", m.images.size()}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace diagen::refine
