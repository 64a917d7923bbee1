#include "diagen/layout/autodiff.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace diagen::layout::ad {

double Var::value() const { return graph_->value(id_); }

Var Graph::constant(double value) {
  nodes_.push_back(Node{Op::Const, -1, -1, -1, value});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::param(int slot) {
  nodes_.push_back(Node{Op::Param, -1, -1, slot, 0.0});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::unary(Op op, Var a) {
  assert(a.graph() == this);
  nodes_.push_back(Node{op, a.id(), -1, -1, 0.0});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::binary(Op op, Var a, Var b) {
  assert(a.graph() == this && b.graph() == this);
  nodes_.push_back(Node{op, a.id(), b.id(), -1, 0.0});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Graph::forward(std::span<const double> x) {
  for (Node& n : nodes_) {
    const double a = n.a >= 0 ? nodes_[static_cast<std::size_t>(n.a)].value : 0.0;
    const double b = n.b >= 0 ? nodes_[static_cast<std::size_t>(n.b)].value : 0.0;
    switch (n.op) {
      case Op::Const: break;
      case Op::Param: n.value = x[static_cast<std::size_t>(n.slot)]; break;
      case Op::Add: n.value = a + b; break;
      case Op::Sub: n.value = a - b; break;
      case Op::Mul: n.value = a * b; break;
      case Op::Div: n.value = a / b; break;
      case Op::Neg: n.value = -a; break;
      case Op::Sqrt: n.value = std::sqrt(std::max(a, 0.0)); break;
      case Op::Square: n.value = a * a; break;
      case Op::Max0: n.value = a > 0.0 ? a : 0.0; break;
      case Op::Max: n.value = a >= b ? a : b; break;
      case Op::Min: n.value = a <= b ? a : b; break;
      case Op::Abs: n.value = std::abs(a); break;
    }
  }
}

void Graph::backward(std::span<const std::pair<int, double>> seeds, std::span<double> grad) {
  adjoint_.assign(nodes_.size(), 0.0);
  for (const auto& [id, seed] : seeds) adjoint_[static_cast<std::size_t>(id)] += seed;

  for (std::size_t i = nodes_.size(); i-- > 0;) {
    const double g = adjoint_[i];
    if (g == 0.0) continue;
    const Node& n = nodes_[i];
    const auto ia = static_cast<std::size_t>(n.a);
    const auto ib = static_cast<std::size_t>(n.b);
    switch (n.op) {
      case Op::Const: break;
      case Op::Param: grad[static_cast<std::size_t>(n.slot)] += g; break;
      case Op::Add:
        adjoint_[ia] += g;
        adjoint_[ib] += g;
        break;
      case Op::Sub:
        adjoint_[ia] += g;
        adjoint_[ib] -= g;
        break;
      case Op::Mul:
        adjoint_[ia] += g * nodes_[ib].value;
        adjoint_[ib] += g * nodes_[ia].value;
        break;
      case Op::Div: {
        const double bv = nodes_[ib].value;
        adjoint_[ia] += g / bv;
        adjoint_[ib] -= g * nodes_[ia].value / (bv * bv);
        break;
      }
      case Op::Neg: adjoint_[ia] -= g; break;
      case Op::Sqrt:
        if (n.value > 0.0) adjoint_[ia] += g / (2.0 * n.value);
        break;
      case Op::Square: adjoint_[ia] += 2.0 * g * nodes_[ia].value; break;
      case Op::Max0:
        if (nodes_[ia].value > 0.0) adjoint_[ia] += g;
        break;
      case Op::Max:
        adjoint_[nodes_[ia].value >= nodes_[ib].value ? ia : ib] += g;
        break;
      case Op::Min:
        adjoint_[nodes_[ia].value <= nodes_[ib].value ? ia : ib] += g;
        break;
      case Op::Abs: {
        const double av = nodes_[ia].value;
        if (av > 0.0) adjoint_[ia] += g;
        if (av < 0.0) adjoint_[ia] -= g;
        break;
      }
    }
  }
}

Var operator+(Var a, Var b) { return a.graph()->binary(Op::Add, a, b); }
Var operator-(Var a, Var b) { return a.graph()->binary(Op::Sub, a, b); }
Var operator*(Var a, Var b) { return a.graph()->binary(Op::Mul, a, b); }
Var operator/(Var a, Var b) { return a.graph()->binary(Op::Div, a, b); }
Var operator-(Var a) { return a.graph()->unary(Op::Neg, a); }
Var operator+(Var a, double b) { return a + a.graph()->constant(b); }
Var operator+(double a, Var b) { return b.graph()->constant(a) + b; }
Var operator-(Var a, double b) { return a - a.graph()->constant(b); }
Var operator-(double a, Var b) { return b.graph()->constant(a) - b; }
Var operator*(Var a, double b) { return a * a.graph()->constant(b); }
Var operator*(double a, Var b) { return b.graph()->constant(a) * b; }
Var operator/(Var a, double b) { return a / a.graph()->constant(b); }
Var operator/(double a, Var b) { return b.graph()->constant(a) / b; }

Var sqrt(Var a) { return a.graph()->unary(Op::Sqrt, a); }
Var square(Var a) { return a.graph()->unary(Op::Square, a); }
Var max0(Var a) { return a.graph()->unary(Op::Max0, a); }
Var max(Var a, Var b) { return a.graph()->binary(Op::Max, a, b); }
Var min(Var a, Var b) { return a.graph()->binary(Op::Min, a, b); }
Var abs(Var a) { return a.graph()->unary(Op::Abs, a); }

}  // namespace diagen::layout::ad
