#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "chronofact/tensor.hpp"

namespace chronofact {

// Trainable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}
  void zero_grad() { grad.fill(0.0); }
};

namespace ad {

class Graph;

// Handle to a node of a Graph. Cheap to copy; only valid while its Graph lives.
class Var {
 public:
  Var() = default;
  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  double scalar() const;
  std::size_t id() const { return id_; }
  Graph* graph() const { return graph_; }
  bool valid() const { return graph_ != nullptr; }

 private:
  friend class Graph;
  Var(Graph* g, std::size_t id) : graph_(g), id_(id) {}
  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

// Tape for reverse-mode differentiation. Nodes are appended in evaluation
// order, so walking them backwards is a valid topological order.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  Var zeros(std::size_t rows, std::size_t cols) { return constant(Tensor(rows, cols)); }
  // Leaf bound to `p`. Repeated calls with the same parameter share one node.
  Var parameter(Parameter& p);

  // d(loss)/d(param) is added to every bound Parameter::grad.
  // `loss` must be 1 x 1.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

  // Low-level node construction used by the operations below.
  Var push(Tensor value, std::vector<Var> parents, std::function<void(Graph&, std::size_t)> backward);
  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  // Gradient slot of a node, allocated on first use.
  Tensor& grad(std::size_t id);
  const Tensor& output_grad(std::size_t id) const { return nodes_[id].grad; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Graph&, std::size_t)> backward;
    Parameter* parameter = nullptr;
    bool requires_grad = false;
  };
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
};

// x: r x in, w: out x in, b: 1 x out (optional). Returns x w^T + b.
Var linear(Var x, Var w, Var b = {});
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
// s is 1 x 1
Var scale(Var x, Var s);
Var scale(Var x, double s);
Var divide(Var x, Var s);
Var relu(Var x);
Var tanh(Var x);
Var sigmoid(Var x);
Var log(Var x);
Var floor_at(Var x, double lo);
Var clamp(Var x, double lo, double hi);
Var softmax(Var x);                       // 1 x n
Var concat(std::span<const Var> parts);   // row vectors, joined along columns
Var slice(Var x, std::size_t begin, std::size_t len);
Var element(Var x, std::size_t i);        // 1 x 1
Var stack(std::span<const Var> scalars);  // 1 x 1 each -> 1 x n
Var sum(Var x);                           // 1 x 1
Var mean_rows(Var x);                     // r x c -> 1 x c
Var row(Var x, std::size_t r);            // 1 x c
// Cosine of two row vectors; 0 with zero gradient when either norm is 0.
Var cosine(Var a, Var b);
// Mean cosine over all row pairs of a (p x c) and b (q x c).
Var pairwise_cosine_mean(Var a, Var b);
// Lowest index wins ties; gradient flows to the selected input only.
Var minimum(std::span<const Var> scalars);
Var maximum(std::span<const Var> scalars);
// One LSTM step. x: 1 x in, h, c: 1 x H, wx: 4H x in, wh: 4H x H, b: 1 x 4H,
// gate order (input, forget, cell, output). Returns 1 x 2H = [h' | c'].
Var lstm_cell(Var x, Var h, Var c, Var wx, Var wh, Var b);

}  // namespace ad
}  // namespace chronofact
