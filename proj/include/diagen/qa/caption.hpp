#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "diagen/dsl/domain.hpp"
#include "diagen/dsl/substance.hpp"

namespace diagen::qa {

/// Phrase templates for one domain. `{0}`, `{1}`, ... are predicate or
/// function arguments; for a function binding `{0}` is the bound identifier
/// and the arguments follow.
struct CaptionTemplates {
  std::map<std::string, std::pair<std::string, std::string>> types;  // singular, plural
  std::map<std::string, std::string> predicates;
  std::map<std::string, std::string> functions;
};

/// Reads {"types": {"Set": ["set", "sets"]}, "predicates": {...}, "functions": {...}}.
CaptionTemplates parse_caption_templates(std::string_view json_text);
CaptionTemplates load_caption_templates(const std::filesystem::path& path);

class CaptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Caption {
  std::string text;
  std::string program_id;
  std::vector<std::pair<std::size_t, std::string>> derivation;  // statement index, phrase
};

/// Deterministic template expansion. Declarations are grouped per type in
/// order of first appearance; each other statement becomes one sentence.
/// Throws CaptionError naming the first type, predicate or function without
/// a template.
Caption caption_from_substance(const dsl::SubstanceProgram& program, const dsl::DomainSchema& schema,
                               const CaptionTemplates& templates, std::string program_id = {});

}  // namespace diagen::qa
