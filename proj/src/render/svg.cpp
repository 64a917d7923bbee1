#include "diagen/render/svg.hpp"

#include <cmath>

#include <fmt/format.h>

namespace diagen::render {

std::string format_number(double value) {
  std::string s = fmt::format("{:.3f}", value);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string svg_file_name(std::string_view program_id, std::uint64_t seed) {
  return fmt::format("{}_{}.svg", program_id, seed);
}

namespace {

using N = std::string;
N num(double v) { return format_number(v); }

std::string text_element(double x, double y, std::string_view text) {
  return fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" dominant-baseline=\"middle\" "
      "font-family=\"sans-serif\" font-size=\"{}\" fill=\"#000000\">{}</text>\n",
      num(x), num(y), num(kFontSize), xml_escape(text));
}

std::string arrow_path(const layout::SolvedShape& s) {
  const double dx = s.x2 - s.x1;
  const double dy = s.y2 - s.y1;
  const double len = std::hypot(dx, dy);
  std::string d = fmt::format("M {} {} L {} {}", num(s.x1), num(s.y1), num(s.x2), num(s.y2));
  if (len > 0.0) {
    const double head = std::min(10.0, len / 2.0);
    const double ux = dx / len;
    const double uy = dy / len;
    // Two barbs at +-30 degrees from the reversed direction.
    const double c = std::cos(M_PI / 6.0);
    const double sn = std::sin(M_PI / 6.0);
    const double bx1 = s.x2 - head * (ux * c - uy * sn);
    const double by1 = s.y2 - head * (uy * c + ux * sn);
    const double bx2 = s.x2 - head * (ux * c + uy * sn);
    const double by2 = s.y2 - head * (uy * c - ux * sn);
    d += fmt::format(" M {} {} L {} {} L {} {}", num(bx1), num(by1), num(s.x2), num(s.y2), num(bx2),
                     num(by2));
  }
  return fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"{}\"/>\n", d,
                     num(s.stroke_width));
}

}  // namespace

std::string render_svg(const Diagram& diagram) {
  const double w = diagram.canvas.width;
  const double h = diagram.canvas.height;
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
      "viewBox=\"{} {} {} {}\">\n",
      num(w), num(h), num(-w / 2.0), num(-h / 2.0), num(w), num(h));
  for (const layout::SolvedShape& s : diagram.shapes) {
    switch (s.kind) {
      case layout::ShapeKind::Circle:
        out += fmt::format(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" stroke=\"#000000\" stroke-width=\"{}\"/>\n",
            num(s.cx), num(s.cy), num(s.r), s.fill, num(kStrokeWidth));
        break;
      case layout::ShapeKind::Rectangle:
        out += fmt::format(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#000000\" "
            "stroke-width=\"{}\"/>\n",
            num(s.cx - s.width / 2.0), num(s.cy - s.height / 2.0), num(s.width), num(s.height), s.fill,
            num(kStrokeWidth));
        break;
      case layout::ShapeKind::Line:
        out += fmt::format(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\" stroke-width=\"{}\"/>\n",
            num(s.x1), num(s.y1), num(s.x2), num(s.y2), num(s.stroke_width));
        break;
      case layout::ShapeKind::Arrow: out += arrow_path(s); break;
      case layout::ShapeKind::Text: out += text_element(s.cx, s.cy, s.text); break;
    }
  }
  for (const layout::LabelAnchor& l : diagram.labels) out += text_element(l.x, l.y, l.text);
  out += "</svg>\n";
  return out;
}

}  // namespace diagen::render
