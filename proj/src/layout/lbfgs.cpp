#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "diagen/layout/solver.hpp"

namespace diagen::layout {

void SolverSettings::validate() const {
  if (!(c0 > 0.0)) throw std::invalid_argument("solver c0 must be positive");
  if (!(gamma > 1.0)) throw std::invalid_argument("solver gamma must exceed 1");
  if (max_outer < 0) throw std::invalid_argument("solver max_outer must be non-negative");
  if (!(penalty_tol > 0.0) || !(grad_tol > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (lbfgs_memory < 1 || max_inner < 1) {
    throw std::invalid_argument("solver memory and max_inner must be at least 1");
  }
  if (!(armijo > 0.0 && armijo < 1.0) || !(shrink > 0.0 && shrink < 1.0)) {
    throw std::invalid_argument("line search constants must lie in (0, 1)");
  }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct Pair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

/// Two-loop recursion: returns -H * g.
std::vector<double> direction(const std::deque<Pair>& history, std::span<const double> g) {
  std::vector<double> q(g.begin(), g.end());
  std::vector<double> alpha(history.size());
  for (std::size_t i = history.size(); i-- > 0;) {
    const Pair& p = history[i];
    alpha[i] = p.rho * dot(p.s, q);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] -= alpha[i] * p.y[j];
  }
  if (!history.empty()) {
    const Pair& last = history.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t i = 0; i < history.size(); ++i) {
    const Pair& p = history[i];
    const double beta = p.rho * dot(p.y, q);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] += p.s[j] * (alpha[i] - beta);
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

LbfgsResult lbfgs_minimize(const DiffFunction& f, std::vector<double> x0,
                           const SolverSettings& settings, const LbfgsObserver& observer) {
  const std::size_t m = x0.size();
  LbfgsResult result;
  result.x = std::move(x0);
  std::vector<double> g(m, 0.0);
  double fx = f(result.x, g);
  result.value = fx;
  result.grad_norm = norm(g);
  if (!std::isfinite(fx)) {
    throw std::invalid_argument("objective is not finite at the starting point");
  }

  std::deque<Pair> history;
  std::vector<double> x_new(m), g_new(m);

  for (int iter = 0; iter < settings.max_inner; ++iter) {
    if (result.grad_norm <= settings.grad_tol * (1.0 + std::abs(fx))) {
      result.converged = true;
      break;
    }
    std::vector<double> d = direction(history, g);
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      // Curvature information went stale; fall back to steepest descent.
      history.clear();
      d.assign(g.begin(), g.end());
      for (double& v : d) v = -v;
      slope = dot(g, d);
    }
    // Without history the direction is -g, whose scale is arbitrary.
    double step = history.empty() ? std::min(1.0, 1.0 / result.grad_norm) : 1.0;

    bool accepted = false;
    double f_new = fx;
    for (int k = 0; k < settings.max_backtracks; ++k) {
      for (std::size_t j = 0; j < m; ++j) x_new[j] = result.x[j] + step * d[j];
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + settings.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= settings.shrink;
    }
    if (!accepted) {
      result.line_search_failed = true;
      break;
    }

    Pair p{std::vector<double>(m), std::vector<double>(m), 0.0};
    for (std::size_t j = 0; j < m; ++j) {
      p.s[j] = x_new[j] - result.x[j];
      p.y[j] = g_new[j] - g[j];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-12 * dot(p.y, p.y) && sy > 0.0) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      if (history.size() > static_cast<std::size_t>(settings.lbfgs_memory)) history.pop_front();
    }

    std::swap(result.x, x_new);
    std::swap(g, g_new);
    fx = f_new;
    result.value = fx;
    result.grad_norm = norm(g);
    result.iterations = iter + 1;
    if (observer) observer(result.iterations, fx);
  }
  if (!result.converged && !result.line_search_failed &&
      result.grad_norm <= settings.grad_tol * (1.0 + std::abs(fx))) {
    result.converged = true;
  }
  return result;
}

}  // namespace diagen::layout
