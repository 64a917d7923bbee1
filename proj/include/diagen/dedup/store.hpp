#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diagen/dsl/substance.hpp"

namespace diagen::dedup {

/// Edit distance over whole elements (insert, delete, substitute), two-row DP.
template <class T>
std::size_t levenshtein(std::span<const T> a, std::span<const T> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b);

/// Levenshtein over already sorted statement lines.
std::size_t line_distance(std::span<const std::string> sorted_a, std::span<const std::string> sorted_b);

/// Levenshtein over the sorted canonical statement lines of both programs.
std::size_t line_distance(const dsl::SubstanceProgram& p, const dsl::SubstanceProgram& q);

struct Entry {
  std::string id;
  std::vector<std::string> lines;  // sorted canonical statements
};

/// Admitted programs of one domain. A candidate is rejected when its line
/// distance to any admitted entry is below the threshold. All members are
/// safe to call from several threads.
class DedupStore {
 public:
  explicit DedupStore(std::size_t threshold = 2, std::string id_prefix = "p");

  DedupStore(const DedupStore&) = delete;
  DedupStore& operator=(const DedupStore&) = delete;

  bool should_admit(const dsl::SubstanceProgram& candidate) const;
  bool should_admit_lines(std::span<const std::string> sorted_lines) const;

  /// Adds the candidate and returns its id. Throws std::logic_error when
  /// should_admit would say no.
  std::string admit(const dsl::SubstanceProgram& candidate);

  /// should_admit + admit under one lock; nullopt on rejection.
  std::optional<std::string> try_admit(const dsl::SubstanceProgram& candidate);

  /// Smallest distance to an admitted entry, nullopt when empty.
  std::optional<std::size_t> nearest(const dsl::SubstanceProgram& candidate) const;

  std::size_t size() const;
  std::size_t threshold() const { return threshold_; }
  std::vector<Entry> entries() const;

  /// One JSON object per line: {"id": ..., "lines": [...]}.
  std::string to_jsonl() const;
  void save(const std::filesystem::path& path) const;

  /// Reloads a saved store. Entries are taken as-is; ids continue after the
  /// largest numeric suffix seen. Throws std::runtime_error on malformed lines.
  static std::unique_ptr<DedupStore> load(const std::filesystem::path& path, std::size_t threshold = 2,
                                          std::string id_prefix = "p");
  void load_jsonl(std::string_view text);

 private:
  bool admissible_locked(std::span<const std::string> lines) const;
  std::string insert_locked(std::vector<std::string> lines);

  std::size_t threshold_;
  std::string prefix_;
  std::size_t next_id_ = 0;
  std::vector<Entry> entries_;
  mutable std::mutex mutex_;
};

}  // namespace diagen::dedup
