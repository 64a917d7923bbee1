#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "diagen/layout/problem.hpp"

namespace diagen::layout {

struct SolverSettings {
  double c0 = 10.0;
  double gamma = 10.0;
  int max_outer = 6;
  double penalty_tol = 1e-5;
  int lbfgs_memory = 10;
  int max_inner = 500;
  /// Stop when |grad| <= grad_tol * (1 + |f|).
  double grad_tol = 1e-8;
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 60;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

/// f(x), writing the gradient into `grad`.
using DiffFunction = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;          // gradient test met
  bool line_search_failed = false;
};

/// Called after every accepted step with (iteration, f).
using LbfgsObserver = std::function<void(int, double)>;

LbfgsResult lbfgs_minimize(const DiffFunction& f, std::vector<double> x0,
                           const SolverSettings& settings, const LbfgsObserver& observer = {});

struct SolveResult {
  std::vector<double> params;
  double total_energy = 0.0;
  double total_penalty = 0.0;
  int outer_rounds = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  std::vector<double> stiffness;  // c_n of every round run
};

/// One exterior round: minimizes sum E + c * sum P^2 from x0.
LbfgsResult minimize_at_stiffness(const LayoutProblem& problem, std::vector<double> x0, double c,
                                  const SolverSettings& settings,
                                  const LbfgsObserver& observer = {});

/// Rounds n = 0..max_outer with c_n = c0 * gamma^n, warm-started, until the
/// total penalty is within penalty_tol.
SolveResult solve_exterior(const LayoutProblem& problem, std::vector<double> x0,
                           const SolverSettings& settings);

/// Deterministic initial point: X/Y slots uniform over the canvas, Size slots
/// uniform in [min(w,h)/20, min(w,h)/6].
std::vector<double> sample_init(const LayoutProblem& problem, std::uint64_t seed);

/// Uniform double in [0, 1) from a 64-bit engine, portable across standard
/// libraries.
double unit_uniform(std::uint64_t bits);

}  // namespace diagen::layout
