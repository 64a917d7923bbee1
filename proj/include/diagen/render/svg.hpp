#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "diagen/layout/diagram.hpp"

namespace diagen::render {

using layout::Diagram;

inline constexpr double kLabelOffset = 8.0;
inline constexpr double kLabelSpacing = 12.0;
inline constexpr double kFontSize = 14.0;
inline constexpr double kStrokeWidth = 1.5;

/// Anchors every labeled shape: circles, rectangles and text at the center,
/// lines and arrows at the midpoint offset 8 units along the normal
/// (dy, -dx)/len, clamped to the canvas. In shape order, an anchor closer than
/// 12 units to an earlier label moves to the first free spot on rings of
/// radius 12k around it.
Diagram place_labels(Diagram diagram);

/// Standalone SVG 1.1 document. The view box is centered on the origin so
/// layout coordinates are written unchanged.
std::string render_svg(const Diagram& diagram);

/// Fixed-point with at most 3 decimals, trailing zeros trimmed, no "-0".
std::string format_number(double value);

std::string xml_escape(std::string_view text);

/// `<programId>_<seed>.svg`
std::string svg_file_name(std::string_view program_id, std::uint64_t seed);

}  // namespace diagen::render
