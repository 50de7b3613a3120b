#include "tag/numcore/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tag/error.hpp"

namespace tag {

struct GraphAccess {
  static Graph::Node& node(Graph& g, std::uint32_t id) { return g.nodes_[id]; }
  static const Tensor& value(const Graph& g, std::uint32_t id) { return g.value_of(id); }

  static Expr push(Graph& g, OpKind op, std::vector<std::uint32_t> inputs, Tensor value) {
    Graph::Node n;
    n.op = op;
    n.value = std::move(value);
    n.inputs = std::move(inputs);
    g.nodes_.push_back(std::move(n));
    return Expr(&g, static_cast<std::uint32_t>(g.nodes_.size() - 1));
  }
};

namespace {

Graph& same_graph(Expr a, Expr b) {
  if (!a.valid() || !b.valid() || a.graph() != b.graph()) {
    throw Error("operands belong to different graphs");
  }
  return *a.graph();
}

Graph& graph_of(Expr a) {
  if (!a.valid()) throw Error("unbound expression");
  return *a.graph();
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
  }
}

void require_rank(const Tensor& a, std::size_t rank, const char* op) {
  if (a.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                     shape_string(a.shape()));
  }
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

const Tensor& Expr::value() const { return GraphAccess::value(*graph_, id_); }

double Expr::scalar() const {
  const Tensor& v = value();
  if (v.size() != 1) throw ShapeError("scalar() on tensor of shape " + shape_string(v.shape()));
  return v[0];
}

const Tensor& Graph::value_of(std::uint32_t id) const {
  const Node& n = nodes_[id];
  return n.param ? *n.param : n.value;
}

std::vector<double>& Graph::grad_of(std::uint32_t id) {
  Node& n = nodes_[id];
  if (n.param) return n.param->grad();
  if (n.grad.size() != n.value.size()) n.grad.assign(n.value.size(), 0.0);
  return n.grad;
}

Expr Graph::constant(Tensor value) {
  return GraphAccess::push(*this, OpKind::kConstant, {}, std::move(value));
}

Expr Graph::param(Tensor& tensor) {
  if (auto it = bound_.find(&tensor); it != bound_.end()) return Expr(this, it->second);
  Node n;
  n.op = OpKind::kParam;
  n.param = &tensor;
  nodes_.push_back(std::move(n));
  const auto id = static_cast<std::uint32_t>(nodes_.size() - 1);
  bound_.emplace(&tensor, id);
  return Expr(this, id);
}

void Graph::clear() {
  nodes_.clear();
  bound_.clear();
}

void Graph::backward(Expr root) {
  if (root.graph() != this) throw Error("backward: root is not on this graph");
  if (value_of(root.id()).size() != 1) {
    throw ShapeError("backward: root must be a scalar, got shape " +
                     shape_string(value_of(root.id()).shape()));
  }
  grad_of(root.id())[0] += 1.0;
  for (std::uint32_t id = root.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.op == OpKind::kConstant || n.op == OpKind::kParam) continue;
    if (n.grad.empty()) continue;
    propagate(id);
  }
  clear();
}

void Graph::propagate(std::uint32_t id) {
  // grad_of() only resizes other nodes' buffers, so these references stay valid.
  const Node& n = nodes_[id];
  const std::vector<double>& g = n.grad;
  const Tensor& out = n.value;

  switch (n.op) {
    case OpKind::kConstant:
    case OpKind::kParam:
      break;
    case OpKind::kMatMul: {
      const Tensor& a = value_of(n.inputs[0]);
      const Tensor& b = value_of(n.inputs[1]);
      const std::size_t m = a.dim(0), k = a.dim(1);
      const std::size_t cols = b.rank() == 1 ? 1 : b.dim(1);
      auto& ga = grad_of(n.inputs[0]);
      auto& gb = grad_of(n.inputs[1]);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t c = 0; c < cols; ++c) {
          const double gi = g[i * cols + c];
          if (gi == 0.0) continue;
          for (std::size_t j = 0; j < k; ++j) {
            ga[i * k + j] += gi * b[j * cols + c];
            gb[j * cols + c] += a[i * k + j] * gi;
          }
        }
      }
      break;
    }
    case OpKind::kTranspose: {
      const std::size_t r = out.dim(0), c = out.dim(1);
      auto& ga = grad_of(n.inputs[0]);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) ga[j * r + i] += g[i * c + j];
      break;
    }
    case OpKind::kAdd: {
      auto& ga = grad_of(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      auto& gb = grad_of(n.inputs[1]);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
      break;
    }
    case OpKind::kSub: {
      auto& ga = grad_of(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      auto& gb = grad_of(n.inputs[1]);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
      break;
    }
    case OpKind::kMul: {
      const Tensor& a = value_of(n.inputs[0]);
      const Tensor& b = value_of(n.inputs[1]);
      auto& ga = grad_of(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b[i];
      auto& gb = grad_of(n.inputs[1]);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a[i];
      break;
    }
    case OpKind::kScale: {
      auto& ga = grad_of(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.factor;
      break;
    }
    case OpKind::kConcat: {
      std::size_t offset = 0;
      for (std::uint32_t in : n.inputs) {
        auto& gi = grad_of(in);
        for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += g[offset + i];
        offset += gi.size();
      }
      break;
    }
    case OpKind::kStack: {
      const std::size_t cols = out.dim(1);
      for (std::size_t r = 0; r < n.inputs.size(); ++r) {
        auto& gi = grad_of(n.inputs[r]);
        for (std::size_t c = 0; c < cols; ++c) gi[c] += g[r * cols + c];
      }
      break;
    }
    case OpKind::kSigmoid: {
      auto& ga = grad_of(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * out[i] * (1.0 - out[i]);
      break;
    }
    case OpKind::kTanh: {
      auto& ga = grad_of(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - out[i] * out[i]);
      break;
    }
    case OpKind::kExp: {
      auto& ga = grad_of(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * out[i];
      break;
    }
    case OpKind::kLog: {
      const Tensor& a = value_of(n.inputs[0]);
      auto& ga = grad_of(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / a[i];
      break;
    }
    case OpKind::kSoftmax:
    case OpKind::kWeightedSoftmax: {
      double dot = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * out[i];
      auto& ga = grad_of(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += out[i] * (g[i] - dot);
      break;
    }
    case OpKind::kLookup: {
      auto& ga = grad_of(n.inputs[0]);
      const std::size_t cols = out.size();
      for (std::size_t c = 0; c < cols; ++c) ga[n.index * cols + c] += g[c];
      break;
    }
    case OpKind::kSum: {
      auto& ga = grad_of(n.inputs[0]);
      for (double& v : ga) v += g[0];
      break;
    }
    case OpKind::kPick: {
      grad_of(n.inputs[0])[n.index] += g[0];
      break;
    }
    case OpKind::kAffine: {
      auto& gbias = grad_of(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) gbias[i] += g[i];
      const std::size_t rows = g.size();
      for (std::size_t t = 1; t + 1 < n.inputs.size(); t += 2) {
        const Tensor& w = value_of(n.inputs[t]);
        const Tensor& x = value_of(n.inputs[t + 1]);
        const std::size_t cols = x.size();
        auto& gw = grad_of(n.inputs[t]);
        auto& gx = grad_of(n.inputs[t + 1]);
        for (std::size_t r = 0; r < rows; ++r) {
          const double gr = g[r];
          if (gr == 0.0) continue;
          const double* wr = &w[r * cols];
          double* gwr = &gw[r * cols];
          for (std::size_t c = 0; c < cols; ++c) {
            gwr[c] += gr * x[c];
            gx[c] += wr[c] * gr;
          }
        }
      }
      break;
    }
  }
}

Expr matmul(Expr a, Expr b) {
  Graph& g = same_graph(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank(av, 2, "matmul");
  if (bv.rank() != 1 && bv.rank() != 2) throw ShapeError("matmul: rhs must be rank 1 or 2");
  const std::size_t m = av.dim(0), k = av.dim(1);
  if (bv.dim(0) != k) {
    throw ShapeError("matmul: inner dimensions differ " + shape_string(av.shape()) + " x " +
                     shape_string(bv.shape()));
  }
  const std::size_t cols = bv.rank() == 1 ? 1 : bv.dim(1);
  Tensor out(bv.rank() == 1 ? Shape{m} : Shape{m, cols});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double aij = av[i * k + j];
      for (std::size_t c = 0; c < cols; ++c) out[i * cols + c] += aij * bv[j * cols + c];
    }
  }
  return GraphAccess::push(g, OpKind::kMatMul, {a.id(), b.id()}, std::move(out));
}

Expr transpose(Expr a) {
  Graph& g = graph_of(a);
  const Tensor& av = a.value();
  require_rank(av, 2, "transpose");
  const std::size_t r = av.dim(0), c = av.dim(1);
  Tensor out({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = av[i * c + j];
  return GraphAccess::push(g, OpKind::kTranspose, {a.id()}, std::move(out));
}

namespace {

template <class F>
Expr binary(Expr a, Expr b, OpKind op, const char* name, F f) {
  Graph& g = same_graph(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_same_shape(av, bv, name);
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i], bv[i]);
  return GraphAccess::push(g, op, {a.id(), b.id()}, std::move(out));
}

template <class F>
Expr unary(Expr a, OpKind op, F f) {
  Graph& g = graph_of(a);
  const Tensor& av = a.value();
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i]);
  return GraphAccess::push(g, op, {a.id()}, std::move(out));
}

}  // namespace

Expr add(Expr a, Expr b) {
  return binary(a, b, OpKind::kAdd, "add", [](double x, double y) { return x + y; });
}

Expr sub(Expr a, Expr b) {
  return binary(a, b, OpKind::kSub, "sub", [](double x, double y) { return x - y; });
}

Expr mul(Expr a, Expr b) {
  return binary(a, b, OpKind::kMul, "mul", [](double x, double y) { return x * y; });
}

Expr scale(Expr a, double factor) {
  Expr e = unary(a, OpKind::kScale, [factor](double x) { return x * factor; });
  GraphAccess::node(*e.graph(), e.id()).factor = factor;
  return e;
}

Expr concat(std::span<const Expr> parts) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  Graph& g = graph_of(parts[0]);
  std::vector<double> data;
  std::vector<std::uint32_t> ids;
  for (const Expr& p : parts) {
    same_graph(parts[0], p);
    require_rank(p.value(), 1, "concat");
    data.insert(data.end(), p.value().values().begin(), p.value().values().end());
    ids.push_back(p.id());
  }
  return GraphAccess::push(g, OpKind::kConcat, std::move(ids), Tensor::vector(std::move(data)));
}

Expr stack(std::span<const Expr> rows) {
  if (rows.empty()) throw ShapeError("stack: no operands");
  Graph& g = graph_of(rows[0]);
  const std::size_t cols = rows[0].size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  std::vector<std::uint32_t> ids;
  for (const Expr& r : rows) {
    same_graph(rows[0], r);
    require_rank(r.value(), 1, "stack");
    if (r.size() != cols) throw ShapeError("stack: rows differ in length");
    data.insert(data.end(), r.value().values().begin(), r.value().values().end());
    ids.push_back(r.id());
  }
  return GraphAccess::push(g, OpKind::kStack, std::move(ids),
                           Tensor::matrix(rows.size(), cols, std::move(data)));
}

Expr sigmoid(Expr a) { return unary(a, OpKind::kSigmoid, stable_sigmoid); }

Expr tanh(Expr a) { return unary(a, OpKind::kTanh, [](double x) { return std::tanh(x); }); }

Expr exp(Expr a) { return unary(a, OpKind::kExp, [](double x) { return std::exp(x); }); }

Expr log(Expr a) { return unary(a, OpKind::kLog, [](double x) { return std::log(x); }); }

Expr softmax(Expr a) {
  Graph& g = graph_of(a);
  const Tensor& av = a.value();
  require_rank(av, 1, "softmax");
  const double mx = *std::max_element(av.values().begin(), av.values().end());
  Tensor out(av.shape());
  double z = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    out[i] = std::exp(av[i] - mx);
    z += out[i];
  }
  for (double& v : out.values()) v /= z;
  return GraphAccess::push(g, OpKind::kSoftmax, {a.id()}, std::move(out));
}

Expr weighted_softmax(Expr scores, std::vector<double> weights) {
  Graph& g = graph_of(scores);
  const Tensor& sv = scores.value();
  require_rank(sv, 1, "weighted_softmax");
  if (weights.size() != sv.size()) throw ShapeError("weighted_softmax: weight count mismatch");
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sv.size(); ++i) {
    if (weights[i] < 0.0) throw NumericError("weighted_softmax: negative weight");
    if (weights[i] > 0.0) mx = std::max(mx, sv[i]);
  }
  if (!std::isfinite(mx)) throw NumericError("weighted_softmax: every weight is zero");
  Tensor out(sv.shape());
  double z = 0.0;
  for (std::size_t i = 0; i < sv.size(); ++i) {
    out[i] = weights[i] > 0.0 ? weights[i] * std::exp(sv[i] - mx) : 0.0;
    z += out[i];
  }
  for (double& v : out.values()) v /= z;
  Expr e = GraphAccess::push(g, OpKind::kWeightedSoftmax, {scores.id()}, std::move(out));
  GraphAccess::node(g, e.id()).aux = std::move(weights);
  return e;
}

Expr lookup(Expr table, std::size_t row) {
  Graph& g = graph_of(table);
  const Tensor& tv = table.value();
  require_rank(tv, 2, "lookup");
  if (row >= tv.dim(0)) throw ShapeError("lookup: row " + std::to_string(row) + " out of range");
  const std::size_t cols = tv.dim(1);
  std::vector<double> data(tv.values().begin() + static_cast<std::ptrdiff_t>(row * cols),
                           tv.values().begin() + static_cast<std::ptrdiff_t>((row + 1) * cols));
  Expr e = GraphAccess::push(g, OpKind::kLookup, {table.id()}, Tensor::vector(std::move(data)));
  GraphAccess::node(g, e.id()).index = row;
  return e;
}

Expr sum(Expr a) {
  Graph& g = graph_of(a);
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return GraphAccess::push(g, OpKind::kSum, {a.id()}, Tensor::scalar(s));
}

Expr pick(Expr a, std::size_t index) {
  Graph& g = graph_of(a);
  if (index >= a.size()) throw ShapeError("pick: index out of range");
  Expr e = GraphAccess::push(g, OpKind::kPick, {a.id()}, Tensor::scalar(a.value()[index]));
  GraphAccess::node(g, e.id()).index = index;
  return e;
}

Expr affine(Expr bias, std::span<const std::pair<Expr, Expr>> terms) {
  Graph& g = graph_of(bias);
  const Tensor& bv = bias.value();
  require_rank(bv, 1, "affine");
  Tensor out = Tensor(bv.shape(), bv.values());
  std::vector<std::uint32_t> ids{bias.id()};
  const std::size_t rows = bv.size();
  for (const auto& [w, x] : terms) {
    same_graph(bias, w);
    same_graph(bias, x);
    const Tensor& wv = w.value();
    const Tensor& xv = x.value();
    require_rank(wv, 2, "affine");
    require_rank(xv, 1, "affine");
    if (wv.dim(0) != rows || wv.dim(1) != xv.size()) {
      throw ShapeError("affine: " + shape_string(wv.shape()) + " x " + shape_string(xv.shape()) +
                       " does not match bias " + shape_string(bv.shape()));
    }
    const std::size_t cols = xv.size();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* wr = &wv[r * cols];
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * xv[c];
      out[r] += acc;
    }
    ids.push_back(w.id());
    ids.push_back(x.id());
  }
  return GraphAccess::push(g, OpKind::kAffine, std::move(ids), std::move(out));
}

Expr add_all(std::span<const Expr> terms) {
  if (terms.empty()) throw ShapeError("add_all: no operands");
  Expr acc = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) acc = add(acc, terms[i]);
  return acc;
}

}  // namespace tag
