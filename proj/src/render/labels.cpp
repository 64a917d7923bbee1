#include <algorithm>
#include <cmath>

#include "diagen/render/svg.hpp"

namespace diagen::render {

namespace {

constexpr int kMaxRings = 64;

struct Anchor {
  double x;
  double y;
};

Anchor anchor_for(const layout::SolvedShape& s) {
  if (s.kind == layout::ShapeKind::Line || s.kind == layout::ShapeKind::Arrow) {
    const double dx = s.x2 - s.x1;
    const double dy = s.y2 - s.y1;
    const double len = std::hypot(dx, dy);
    const double nx = len > 0.0 ? dy / len : 0.0;
    const double ny = len > 0.0 ? -dx / len : -1.0;
    return {(s.x1 + s.x2) / 2.0 + kLabelOffset * nx, (s.y1 + s.y2) / 2.0 + kLabelOffset * ny};
  }
  return {s.cx, s.cy};
}

}  // namespace

Diagram place_labels(Diagram diagram) {
  diagram.labels.clear();
  for (const layout::SolvedShape& s : diagram.shapes) {
    if (!s.label) continue;
    const Anchor a = anchor_for(s);
    diagram.labels.push_back({*s.label, a.x, a.y, s.owners.empty() ? std::string() : s.owners.front()});
  }

  const double hw = diagram.canvas.width / 2.0;
  const double hh = diagram.canvas.height / 2.0;
  auto& labels = diagram.labels;
  auto clamped = [&](double x, double y) { return Anchor{std::clamp(x, -hw, hw), std::clamp(y, -hh, hh)}; };
  auto clear_of_earlier = [&](Anchor a, std::size_t i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (std::hypot(a.x - labels[j].x, a.y - labels[j].y) < kLabelSpacing - 1e-9) return false;
    }
    return true;
  };

  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Anchor home = clamped(labels[i].x, labels[i].y);
    Anchor best = home;
    // Rings of radius k * spacing around the anchor, 6k candidates each,
    // starting straight up; first free spot wins.
    for (int ring = 1; !clear_of_earlier(best, i) && ring <= kMaxRings; ++ring) {
      best = home;
      const int steps = 6 * ring;
      for (int k = 0; k < steps; ++k) {
        const double angle = -M_PI / 2.0 + 2.0 * M_PI * k / steps;
        const Anchor c = clamped(labels[i].x + ring * kLabelSpacing * std::cos(angle),
                                 labels[i].y + ring * kLabelSpacing * std::sin(angle));
        if (clear_of_earlier(c, i)) {
          best = c;
          break;
        }
      }
    }
    labels[i].x = best.x;
    labels[i].y = best.y;
  }
  return diagram;
}

}  // namespace diagen::render
