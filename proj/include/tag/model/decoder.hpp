#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "tag/corpus/vocab.hpp"
#include "tag/model/encoder.hpp"
#include "tag/numcore/graph.hpp"
#include "tag/numcore/param_store.hpp"
#include "tag/treelang/tree.hpp"

namespace tag {

inline constexpr std::size_t kOpCopy = 0;
inline constexpr std::size_t kOpGenerate = 1;

struct DecoderConfig {
  bool use_mask = true;    // false: every node may be copied
  bool use_decay = true;   // false: lambda stays 0
  bool allow_copy = true;  // false: generate-only baseline
  double gamma = 0.5;
};

void check_decoder_config(const DecoderConfig& config);

// "dec.emb", "dec.lstm.<i|f|o|u>.<W|U|b>", "dec.att.Wq" [D, 2D],
// "dec.op.Ws" [2, D] (row 0 copy, row 1 generate), "dec.gen.Wg" [V, D].
void register_decoder_params(ParamStore& store, std::size_t target_vocab_size,
                             std::size_t hidden, Rng& rng);

// Standard LSTM cell over the previous state and the embedding of `token`.
std::pair<Expr, Expr> step_recurrence(Graph& g, ParamStore& store, Expr z, Expr c,
                                      std::size_t token);

struct Attention {
  Expr alpha;  // [n] softmax of H z
  Expr q;      // tanh(Wq [H^T alpha ; z])
};
// H is the [n, D] stack of node states.
Attention attend(Graph& g, ParamStore& store, Expr H, Expr z);

Expr operation_distribution(Graph& g, ParamStore& store, Expr q);
Expr generation_distribution(Graph& g, ParamStore& store, Expr q);

// 0 for copyable node types, -infinity otherwise; all zeros without masking.
std::vector<double> build_mask(const TokenTypeTree& tree, const Grammar& grammar,
                               bool use_mask = true);

// Scales every entry by gamma, then sets the copied node (if any) to 1.
std::vector<double> decay_update(const std::vector<double>& lambda,
                                 std::optional<std::size_t> copied, double gamma);

// Per-node weights exp(d_i) * (1 - lambda_i): zero for masked or fully
// decayed nodes.
std::vector<double> copy_weights(const std::vector<double>& mask,
                                 const std::vector<double>& lambda);

// softmax(H q + d) * (1 - lambda), renormalised. Empty when no node has a
// positive weight (copy infeasible).
std::optional<Expr> copy_distribution(Expr H, Expr q, const std::vector<double>& weights);

}  // namespace tag
