#include "diagen/refine/extract.hpp"

#include <vector>

#include "diagen/dsl/substance.hpp"

namespace diagen::refine {

namespace {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find('\n', start);
    std::string line(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return lines;
}

bool is_fence(const std::string& line) { return line.rfind("```", 0) == 0; }

std::string join(const std::vector<std::string>& lines, std::size_t first, std::size_t last) {
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    if (i > first) out += '\n';
    out += lines[i];
  }
  return out;
}

}  // namespace

std::optional<std::string> extract_program(std::string_view response) {
  const std::vector<std::string> lines = split_lines(response);

  std::optional<std::string> block;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!is_fence(lines[i])) continue;
    std::size_t j = i + 1;
    while (j < lines.size() && !is_fence(lines[j])) ++j;
    if (j == lines.size()) break;  // unterminated
    block = join(lines, i + 1, j);
    i = j;
  }
  if (block) return block;

  std::size_t best_start = 0;
  std::size_t best_len = 0;
  std::size_t run_start = 0;
  for (std::size_t i = 0; i <= lines.size(); ++i) {
    if (i < lines.size() && dsl::is_statement_syntax(lines[i])) continue;
    if (i - run_start > best_len) {
      best_len = i - run_start;
      best_start = run_start;
    }
    run_start = i + 1;
  }
  if (best_len == 0) return std::nullopt;
  return join(lines, best_start, best_start + best_len);
}

std::string fence(std::string_view program) {
  std::string out = "```\n";
  out += program;
  out += "\n```";
  return out;
}

}  // namespace diagen::refine
