#include <algorithm>
#include <random>

#include "diagen/layout/solver.hpp"

namespace diagen::layout {

double unit_uniform(std::uint64_t bits) {
  // 53 high bits -> [0, 1); std::uniform_real_distribution is not portable.
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

LbfgsResult minimize_at_stiffness(const LayoutProblem& problem, std::vector<double> x0, double c,
                                  const SolverSettings& settings, const LbfgsObserver& observer) {
  Objective objective(problem);
  DiffFunction f = [&](std::span<const double> x, std::span<double> grad) {
    return objective.evaluate(x, c, grad);
  };
  return lbfgs_minimize(f, std::move(x0), settings, observer);
}

SolveResult solve_exterior(const LayoutProblem& problem, std::vector<double> x0,
                           const SolverSettings& settings) {
  settings.validate();
  Objective objective(problem);
  SolveResult result;
  result.params = std::move(x0);

  double c = settings.c0;
  for (int n = 0; n <= settings.max_outer; ++n) {
    DiffFunction f = [&](std::span<const double> x, std::span<double> grad) {
      return objective.evaluate(x, c, grad);
    };
    LbfgsResult inner = lbfgs_minimize(f, std::move(result.params), settings);
    result.params = std::move(inner.x);
    result.stiffness.push_back(c);
    result.outer_rounds = n + 1;
    result.total_penalty = objective.total_penalty(result.params);
    if (result.total_penalty <= settings.penalty_tol) {
      result.converged = true;
      break;
    }
    c *= settings.gamma;
  }
  result.total_energy = objective.total_energy(result.params);
  return result;
}

std::vector<double> sample_init(const LayoutProblem& problem, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const double w = problem.canvas.width;
  const double h = problem.canvas.height;
  const double smin = std::min(w, h) / 20.0;
  const double smax = std::min(w, h) / 6.0;
  std::vector<double> x(static_cast<std::size_t>(problem.param_count));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = unit_uniform(gen());
    switch (problem.slot_roles[i]) {
      case SlotRole::X: x[i] = (u - 0.5) * w; break;
      case SlotRole::Y: x[i] = (u - 0.5) * h; break;
      case SlotRole::Size: x[i] = smin + u * (smax - smin); break;
    }
  }
  return x;
}

}  // namespace diagen::layout
