#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace diagen::layout::ad {

enum class Op : std::uint8_t {
  Const,
  Param,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Sqrt,
  Square,
  Max0,
  Max,
  Min,
  Abs,
};

struct Node {
  Op op = Op::Const;
  int a = -1;
  int b = -1;
  int slot = -1;       // Param only
  double value = 0.0;  // Const value, or last forward result
};

class Graph;

/// Handle to a node of a Graph. Arithmetic on Vars appends nodes, so the node
/// list is always in topological order.
class Var {
 public:
  Var() = default;
  Var(Graph* graph, int id) : graph_(graph), id_(id) {}

  int id() const { return id_; }
  Graph* graph() const { return graph_; }
  double value() const;

 private:
  Graph* graph_ = nullptr;
  int id_ = -1;
};

/// Static expression graph with a forward pass and one reverse sweep.
class Graph {
 public:
  Var constant(double value);
  Var param(int slot);
  Var unary(Op op, Var a);
  Var binary(Op op, Var a, Var b);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  double value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }

  /// Evaluates every node with parameter values `x`.
  void forward(std::span<const double> x);

  /// Accumulates d(sum seed_i * node_i)/dx into `grad` (which is not cleared).
  /// Uses the values of the last forward pass.
  void backward(std::span<const std::pair<int, double>> seeds, std::span<double> grad);

 private:
  std::vector<Node> nodes_;
  std::vector<double> adjoint_;
};

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double b);
Var operator+(double a, Var b);
Var operator-(Var a, double b);
Var operator-(double a, Var b);
Var operator*(Var a, double b);
Var operator*(double a, Var b);
Var operator/(Var a, double b);
Var operator/(double a, Var b);

/// sqrt with derivative defined as 0 at 0.
Var sqrt(Var a);
Var square(Var a);
/// max(0, a) with subgradient 0 at the kink.
Var max0(Var a);
Var max(Var a, Var b);
Var min(Var a, Var b);
Var abs(Var a);

}  // namespace diagen::layout::ad
