#include "tag/model/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tag/error.hpp"

namespace tag {

void check_decoder_config(const DecoderConfig& config) {
  if (!(config.gamma > 0.0 && config.gamma < 1.0)) {
    throw ConfigError("gamma must lie in (0, 1), got " + std::to_string(config.gamma));
  }
}

void register_decoder_params(ParamStore& store, std::size_t target_vocab_size,
                             std::size_t hidden, Rng& rng) {
  const std::size_t d = hidden;
  store.add("dec.emb", xavier_init({target_vocab_size, d}, rng));
  for (const char* gate : {"i", "f", "o", "u"}) {
    const std::string base = std::string("dec.lstm.") + gate;
    store.add(base + ".W", xavier_init({d, d}, rng));
    store.add(base + ".U", xavier_init({d, d}, rng));
    store.add(base + ".b", Tensor({d}));
  }
  store.add("dec.att.Wq", xavier_init({d, 2 * d}, rng));
  store.add("dec.op.Ws", xavier_init({2, d}, rng));
  store.add("dec.gen.Wg", xavier_init({target_vocab_size, d}, rng));
}

std::pair<Expr, Expr> step_recurrence(Graph& g, ParamStore& store, Expr z, Expr c,
                                      std::size_t token) {
  const Expr x = lookup(g.param(store.get("dec.emb")), token);
  auto gate = [&](const char* name) {
    const std::string base = std::string("dec.lstm.") + name;
    const std::pair<Expr, Expr> terms[] = {{g.param(store.get(base + ".W")), x},
                                           {g.param(store.get(base + ".U")), z}};
    return affine(g.param(store.get(base + ".b")), terms);
  };
  const Expr i = sigmoid(gate("i"));
  const Expr f = sigmoid(gate("f"));
  const Expr o = sigmoid(gate("o"));
  const Expr u = tanh(gate("u"));
  const Expr c_next = add(mul(f, c), mul(i, u));
  return {mul(o, tanh(c_next)), c_next};
}

Attention attend(Graph& g, ParamStore& store, Expr H, Expr z) {
  if (H.shape().empty() || H.shape()[0] == 0) throw ShapeError("attend: no node states");
  Attention a;
  a.alpha = softmax(matmul(H, z));
  const Expr context = matmul(transpose(H), a.alpha);
  const Expr both[] = {context, z};
  a.q = tanh(matmul(g.param(store.get("dec.att.Wq")), concat(both)));
  return a;
}

Expr operation_distribution(Graph& g, ParamStore& store, Expr q) {
  return softmax(matmul(g.param(store.get("dec.op.Ws")), q));
}

Expr generation_distribution(Graph& g, ParamStore& store, Expr q) {
  return softmax(matmul(g.param(store.get("dec.gen.Wg")), q));
}

std::vector<double> build_mask(const TokenTypeTree& tree, const Grammar& grammar, bool use_mask) {
  std::vector<double> d(tree.size(), 0.0);
  if (!use_mask) return d;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (!grammar.is_available(tree.node(i).type)) d[i] = -std::numeric_limits<double>::infinity();
  }
  return d;
}

std::vector<double> decay_update(const std::vector<double>& lambda,
                                 std::optional<std::size_t> copied, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  std::vector<double> out(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) out[i] = gamma * lambda[i];
  if (copied) out.at(*copied) = 1.0;
  return out;
}

std::vector<double> copy_weights(const std::vector<double>& mask,
                                 const std::vector<double>& lambda) {
  if (mask.size() != lambda.size()) throw ShapeError("copy_weights: mask/lambda size mismatch");
  std::vector<double> w(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    w[i] = std::isinf(mask[i]) ? 0.0 : std::exp(mask[i]) * (1.0 - lambda[i]);
  }
  return w;
}

std::optional<Expr> copy_distribution(Expr H, Expr q, const std::vector<double>& weights) {
  if (std::none_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; })) {
    return std::nullopt;
  }
  return weighted_softmax(matmul(H, q), weights);
}

}  // namespace tag
