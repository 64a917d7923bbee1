#include "diagen/pipeline/dataset.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "diagen/refine/prompts.hpp"

namespace diagen::pipeline {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string dataset_text(const std::vector<DatasetRecord>& records) {
  std::string out;
  for (const DatasetRecord& r : records) {
    out += record_json(r).dump();
    out += '\n';
  }
  return out;
}

}  // namespace

nlohmann::ordered_json record_json(const DatasetRecord& r) {
  nlohmann::ordered_json j;
  j["program_id"] = r.program_id;
  j["domain"] = r.domain_name;
  j["substance"] = r.substance;
  j["seed"] = r.seed;
  j["svg"] = r.svg_path;
  j["caption"] = r.caption.text;
  nlohmann::ordered_json derivation = nlohmann::ordered_json::array();
  for (const auto& [index, phrase] : r.caption.derivation) derivation.push_back({index, phrase});
  j["caption_derivation"] = derivation;
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (const qa::MCQItem& item : r.qa_items) {
    const qa::McqFields& f = item.fields;
    nlohmann::ordered_json q;
    q["question"] = f.question;
    q["options"] = {{"A", f.options[0]}, {"B", f.options[1]}, {"C", f.options[2]}, {"D", f.options[3]}};
    q["answer"] = std::string(1, f.answer_key);
    q["category"] = std::string(qa::to_string(f.category));
    q["rationale"] = f.rationale;
    items.push_back(q);
  }
  j["qa"] = items;
  j["judge_score"] = r.judge_score ? nlohmann::ordered_json(*r.judge_score) : nlohmann::ordered_json(nullptr);
  j["refine_rounds"] = r.refine_rounds;
  j["outcome"] = r.outcome;
  return j;
}

DatasetRecord record_from_json(const nlohmann::json& j) {
  DatasetRecord r;
  r.program_id = j.at("program_id").get<std::string>();
  r.domain_name = j.at("domain").get<std::string>();
  r.substance = j.at("substance").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.svg_path = j.at("svg").get<std::string>();
  r.caption.text = j.at("caption").get<std::string>();
  r.caption.program_id = r.program_id;
  for (const auto& d : j.value("caption_derivation", nlohmann::json::array())) {
    r.caption.derivation.emplace_back(d.at(0).get<std::size_t>(), d.at(1).get<std::string>());
  }
  for (const auto& q : j.value("qa", nlohmann::json::array())) {
    qa::MCQItem item;
    item.program_id = r.program_id;
    item.seed = r.seed;
    item.fields.question = q.at("question").get<std::string>();
    for (int k = 0; k < 4; ++k) item.fields.options[k] = q.at("options").at(std::string(1, 'A' + k)).get<std::string>();
    item.fields.answer_key = q.at("answer").get<std::string>().at(0);
    const auto c = qa::skill_from_name(q.at("category").get<std::string>());
    if (!c) throw std::runtime_error("unknown category in dataset record");
    item.fields.category = *c;
    item.fields.rationale = q.value("rationale", std::string{});
    r.qa_items.push_back(std::move(item));
  }
  if (j.contains("judge_score") && !j.at("judge_score").is_null()) r.judge_score = j.at("judge_score").get<double>();
  r.refine_rounds = j.value("refine_rounds", 0);
  r.outcome = j.value("outcome", std::string{});
  return r;
}

void emit_dataset(const std::vector<DatasetRecord>& records, const RunMetrics& metrics,
                  const nlohmann::ordered_json& run_info, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "svg");
  for (const DatasetRecord& r : records) write_file(dir / r.svg_path, r.svg);
  write_file(dir / "dataset.jsonl", dataset_text(records));
  nlohmann::ordered_json manifest = run_info.is_object() ? run_info : nlohmann::ordered_json::object();
  manifest["records"] = records.size();
  manifest["metrics"] = metrics_json(metrics);
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

void write_dataset_jsonl(const std::vector<DatasetRecord>& records, const std::filesystem::path& dir) {
  write_file(dir / "dataset.jsonl", dataset_text(records));
}

std::vector<DatasetRecord> read_dataset(const std::filesystem::path& dir) {
  const std::string text = refine::read_text_file(dir / "dataset.jsonl");
  std::vector<DatasetRecord> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      DatasetRecord r = record_from_json(nlohmann::json::parse(line));
      r.svg = refine::read_text_file(dir / r.svg_path);
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(fmt::format("dataset.jsonl line {}: {}", lineno, e.what()));
    }
  }
  return out;
}

}  // namespace diagen::pipeline
