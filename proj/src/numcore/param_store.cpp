#include "tag/numcore/param_store.hpp"

#include <cmath>

#include "tag/error.hpp"

namespace tag {

Tensor& ParamStore::add(const std::string& name, Tensor init) {
  auto [it, inserted] = entries_.emplace(name, std::move(init));
  if (!inserted) throw Error("parameter registered twice: " + name);
  return it->second;
}

Tensor& ParamStore::get(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw Error("unknown parameter: " + name);
  return it->second;
}

const Tensor& ParamStore::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw Error("unknown parameter: " + name);
  return it->second;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : entries_) n += t.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [_, t] : entries_) t.zero_grad();
}

void ParamStore::drop_grads() {
  for (auto& [_, t] : entries_) t.drop_grad();
}

double ParamStore::grad_norm() const {
  double sq = 0.0;
  for (const auto& [_, t] : entries_) {
    for (double g : t.grad()) sq += g * g;
  }
  return std::sqrt(sq);
}

double ParamStore::clip_grad_norm(double max_norm) {
  const double norm = grad_norm();
  if (norm > max_norm && norm > 0.0) {
    const double factor = max_norm / norm;
    for (auto& [_, t] : entries_) {
      if (!t.has_grad()) continue;
      for (double& g : t.grad()) g *= factor;
    }
  }
  return norm;
}

double xavier_bound(const Shape& shape) {
  if (shape.empty()) throw ShapeError("xavier_init: empty shape");
  shape_size(shape);
  double fan_in = 0.0, fan_out = 0.0;
  if (shape.size() == 1) {
    fan_in = static_cast<double>(shape[0]);
    fan_out = 1.0;
  } else {
    fan_out = static_cast<double>(shape[0]);
    fan_in = static_cast<double>(shape[shape.size() - 1]);
  }
  return std::sqrt(6.0 / (fan_in + fan_out));
}

Tensor xavier_init(const Shape& shape, Rng& rng) {
  const double bound = xavier_bound(shape);
  Tensor t(shape);
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : t.values()) v = dist(rng);
  return t;
}

void adam_step(ParamStore& store, AdamState& state, double lr, double beta1, double beta2,
               double eps) {
  for (const auto& [name, t] : store.entries()) {
    if (!t.has_grad()) throw Error("adam_step: parameter has no gradient: " + name);
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (auto& [name, t] : store.entries()) {
    auto& m = state.m[name];
    auto& v = state.v[name];
    if (m.size() != t.size()) m.assign(t.size(), 0.0);
    if (v.size() != t.size()) v.assign(t.size(), 0.0);
    auto& g = t.grad();
    auto& w = t.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
    t.zero_grad();
  }
}

}  // namespace tag
