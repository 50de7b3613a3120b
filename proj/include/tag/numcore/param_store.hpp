#pragma once

#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tag/numcore/tensor.hpp"

namespace tag {

using Rng = std::mt19937_64;

// Named trainable tensors. Iteration order is the lexicographic name order,
// which keeps checkpoints and optimizer updates deterministic.
class ParamStore {
 public:
  Tensor& add(const std::string& name, Tensor init);
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }

  std::map<std::string, Tensor>& entries() { return entries_; }
  const std::map<std::string, Tensor>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();
  void drop_grads();
  // L2 norm over every gradient entry present.
  double grad_norm() const;
  // Rescales gradients so their joint norm is at most max_norm. Returns the pre-clip norm.
  double clip_grad_norm(double max_norm);

 private:
  std::map<std::string, Tensor> entries_;
};

// Uniform(-b, b) with b = sqrt(6 / (fan_in + fan_out)). For a [rows, cols]
// matrix fan_in = cols and fan_out = rows; a vector of length n has fan_in = n
// and fan_out = 1.
Tensor xavier_init(const Shape& shape, Rng& rng);
double xavier_bound(const Shape& shape);

struct AdamState {
  std::map<std::string, std::vector<double>> m;
  std::map<std::string, std::vector<double>> v;
  std::uint64_t t = 0;
};

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update over every registered parameter, then zeroes
// the gradients. Throws if any parameter has no gradient slot.
void adam_step(ParamStore& store, AdamState& state, double lr, double beta1, double beta2,
               double eps);
inline void adam_step(ParamStore& store, AdamState& state, const AdamConfig& c) {
  adam_step(store, state, c.lr, c.beta1, c.beta2, c.eps);
}

}  // namespace tag
