#include "diagen/refine/prompts.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef DIAGEN_PROMPT_DIR
#define DIAGEN_PROMPT_DIR "prompts"
#endif

namespace diagen::refine {

std::string fill_template(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const std::size_t close = text.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(text.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

PromptLibrary PromptLibrary::bundled() { return PromptLibrary(DIAGEN_PROMPT_DIR); }

std::string PromptLibrary::get(std::string_view name) const {
  const std::filesystem::path path = dir_ / (std::string(name) + ".txt");
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("prompt template not found: " + path.string());
  }
  std::string text = read_text_file(path);
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

}  // namespace diagen::refine
