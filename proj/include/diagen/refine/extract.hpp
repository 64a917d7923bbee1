#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace diagen::refine {

/// The content of the last ``` fenced block; failing that, the longest run of
/// consecutive lines that each read as a Substance statement; else nothing.
std::optional<std::string> extract_program(std::string_view response);

/// Wraps `program` in a bare fence, the inverse used by the fixed-point check.
std::string fence(std::string_view program);

}  // namespace diagen::refine
