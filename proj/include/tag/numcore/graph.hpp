#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tag/numcore/tensor.hpp"

namespace tag {

class Graph;
struct GraphAccess;

// Handle to a node on a Graph tape.
class Expr {
 public:
  Expr() = default;
  Expr(Graph* graph, std::uint32_t id) : graph_(graph), id_(id) {}

  Graph* graph() const { return graph_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t size() const { return value().size(); }
  double scalar() const;

 private:
  Graph* graph_ = nullptr;
  std::uint32_t id_ = 0;
};

enum class OpKind : std::uint8_t {
  kConstant,
  kParam,
  kMatMul,
  kTranspose,
  kAdd,
  kSub,
  kMul,
  kScale,
  kConcat,
  kStack,
  kSigmoid,
  kTanh,
  kExp,
  kLog,
  kSoftmax,
  kWeightedSoftmax,
  kLookup,
  kSum,
  kPick,
  kAffine,
};

// Dynamic reverse-mode tape. Nodes are appended in evaluation order, so the
// tape is already topologically sorted; backward walks it in reverse.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Expr constant(Tensor value);
  Expr scalar(double v) { return constant(Tensor::scalar(v)); }
  // Binds a trainable tensor. Repeated binds of the same tensor return the same node.
  Expr param(Tensor& tensor);

  // Accumulates d(root)/d(node) into every reachable node. Parameter gradients
  // accumulate into the bound tensors' grad slots. Clears the tape afterwards.
  void backward(Expr root);
  void clear();

  std::size_t node_count() const { return nodes_.size(); }

 private:
  friend class Expr;
  friend struct GraphAccess;

  struct Node {
    OpKind op = OpKind::kConstant;
    Tensor value;
    Tensor* param = nullptr;  // set for kParam; value/grad live in the bound tensor
    std::vector<std::uint32_t> inputs;
    std::vector<double> grad;
    std::vector<double> aux;
    std::size_t index = 0;
    double factor = 1.0;
  };

  Node& node(std::uint32_t id) { return nodes_[id]; }
  const Node& node(std::uint32_t id) const { return nodes_[id]; }
  const Tensor& value_of(std::uint32_t id) const;
  std::vector<double>& grad_of(std::uint32_t id);
  void propagate(std::uint32_t id);

  std::vector<Node> nodes_;
  std::unordered_map<const Tensor*, std::uint32_t> bound_;
};

// Matrix product: [m,k]x[k] -> [m] or [m,k]x[k,n] -> [m,n].
Expr matmul(Expr a, Expr b);
Expr transpose(Expr a);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr scale(Expr a, double factor);
// Concatenates rank-1 operands.
Expr concat(std::span<const Expr> parts);
// Stacks equal-length rank-1 operands as matrix rows.
Expr stack(std::span<const Expr> rows);
Expr sigmoid(Expr a);
Expr tanh(Expr a);
Expr exp(Expr a);
Expr log(Expr a);
// Softmax over a non-empty rank-1 operand.
Expr softmax(Expr a);
// p_i = w_i exp(s_i) / sum_j w_j exp(s_j) with w_i >= 0 constant. Entries with
// w_i == 0 come out exactly zero. Throws NumericError if every weight is zero.
Expr weighted_softmax(Expr scores, std::vector<double> weights);
// Row `row` of a [V,D] table.
Expr lookup(Expr table, std::size_t row);
Expr sum(Expr a);
Expr pick(Expr a, std::size_t index);
// bias + sum_i W_i x_i, fused so a gate costs one tape node.
Expr affine(Expr bias, std::span<const std::pair<Expr, Expr>> terms);

// Sum of equal-shape operands; at least one required.
Expr add_all(std::span<const Expr> terms);

}  // namespace tag
