#include "diagen/dedup/store.hpp"

#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace diagen::dedup {

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein<char>(std::span<const char>(a.data(), a.size()), std::span<const char>(b.data(), b.size()));
}

std::size_t line_distance(std::span<const std::string> a, std::span<const std::string> b) {
  return levenshtein<std::string>(a, b);
}

std::size_t line_distance(const dsl::SubstanceProgram& p, const dsl::SubstanceProgram& q) {
  const std::vector<std::string> a = dsl::statement_lines(p);
  const std::vector<std::string> b = dsl::statement_lines(q);
  return line_distance(std::span<const std::string>(a), std::span<const std::string>(b));
}

DedupStore::DedupStore(std::size_t threshold, std::string id_prefix)
    : threshold_(threshold), prefix_(std::move(id_prefix)) {
  if (threshold_ < 1) throw std::invalid_argument("dedup threshold must be at least 1");
}

bool DedupStore::admissible_locked(std::span<const std::string> lines) const {
  for (const Entry& e : entries_) {
    if (line_distance(lines, std::span<const std::string>(e.lines)) < threshold_) return false;
  }
  return true;
}

std::string DedupStore::insert_locked(std::vector<std::string> lines) {
  std::string id = fmt::format("{}{:05}", prefix_, next_id_++);
  entries_.push_back({id, std::move(lines)});
  return id;
}

bool DedupStore::should_admit(const dsl::SubstanceProgram& candidate) const {
  const std::vector<std::string> lines = dsl::statement_lines(candidate);
  std::lock_guard lock(mutex_);
  return admissible_locked(lines);
}

bool DedupStore::should_admit_lines(std::span<const std::string> sorted_lines) const {
  std::lock_guard lock(mutex_);
  return admissible_locked(sorted_lines);
}

std::string DedupStore::admit(const dsl::SubstanceProgram& candidate) {
  std::optional<std::string> id = try_admit(candidate);
  if (!id) throw std::logic_error("admit called with a candidate the store rejects");
  return *id;
}

std::optional<std::string> DedupStore::try_admit(const dsl::SubstanceProgram& candidate) {
  std::vector<std::string> lines = dsl::statement_lines(candidate);
  std::lock_guard lock(mutex_);
  if (!admissible_locked(lines)) return std::nullopt;
  return insert_locked(std::move(lines));
}

std::optional<std::size_t> DedupStore::nearest(const dsl::SubstanceProgram& candidate) const {
  const std::vector<std::string> lines = dsl::statement_lines(candidate);
  std::lock_guard lock(mutex_);
  std::optional<std::size_t> best;
  for (const Entry& e : entries_) {
    const std::size_t d = line_distance(std::span<const std::string>(lines), std::span<const std::string>(e.lines));
    if (!best || d < *best) best = d;
  }
  return best;
}

std::size_t DedupStore::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::vector<Entry> DedupStore::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

std::string DedupStore::to_jsonl() const {
  std::lock_guard lock(mutex_);
  std::string out;
  for (const Entry& e : entries_) {
    out += nlohmann::json{{"id", e.id}, {"lines", e.lines}}.dump();
    out += '\n';
  }
  return out;
}

void DedupStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_jsonl();
}

void DedupStore::load_jsonl(std::string_view text) {
  std::lock_guard lock(mutex_);
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Entry e;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      e.id = j.at("id").get<std::string>();
      e.lines = j.at("lines").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& ex) {
      throw std::runtime_error(fmt::format("dedup store line {}: {}", lineno, ex.what()));
    }
    std::sort(e.lines.begin(), e.lines.end());
    if (e.id.starts_with(prefix_)) {
      try {
        std::size_t used = 0;
        const std::size_t n = std::stoull(e.id.substr(prefix_.size()), &used);
        if (used == e.id.size() - prefix_.size()) next_id_ = std::max(next_id_, n + 1);
      } catch (const std::exception&) {
      }
    }
    entries_.push_back(std::move(e));
  }
}

std::unique_ptr<DedupStore> DedupStore::load(const std::filesystem::path& path, std::size_t threshold,
                                             std::string id_prefix) {
  auto store = std::make_unique<DedupStore>(threshold, std::move(id_prefix));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  store->load_jsonl(ss.str());
  return store;
}

}  // namespace diagen::dedup
