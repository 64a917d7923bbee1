#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace diagen::refine {

/// Replaces each `{key}` whose key is in `values`; other braces are left
/// alone. Substituted text is not rescanned.
std::string fill_template(std::string_view text, const std::map<std::string, std::string>& values);

/// Prompt templates read from a directory of `<name>.txt` files.
class PromptLibrary {
 public:
  PromptLibrary() = default;
  explicit PromptLibrary(std::filesystem::path dir) : dir_(std::move(dir)) {}

  /// Directory baked in at build time.
  static PromptLibrary bundled();

  /// Contents of `<dir>/<name>.txt` with the final newline removed. Throws
  /// std::runtime_error when the file is missing.
  std::string get(std::string_view name) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

std::string read_text_file(const std::filesystem::path& path);

}  // namespace diagen::refine
