#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tag/corpus/vocab.hpp"
#include "tag/model/decoder.hpp"
#include "tag/model/encoder.hpp"
#include "tag/numcore/graph.hpp"
#include "tag/numcore/param_store.hpp"
#include "tag/treelang/tree.hpp"

namespace tag {

struct ModelConfig {
  std::size_t hidden = 64;
  bool type_assoc = true;
  bool k_tied = false;
  DecoderConfig decoder;
};

// Encoder + decoder parameters together with the grammar and vocabularies
// they were built for.
class Model {
 public:
  Model(Grammar grammar, Vocab source, Vocab target, ModelConfig config);

  // Registers and initialises every parameter from `seed`.
  void init(std::uint64_t seed);

  const Grammar& grammar() const { return grammar_; }
  const Vocab& source() const { return source_; }
  const Vocab& target() const { return target_; }
  const ModelConfig& config() const { return config_; }
  ModelConfig& config() { return config_; }
  EncoderConfig encoder_config() const { return {config_.hidden, config_.type_assoc, config_.k_tied}; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

 private:
  Grammar grammar_;
  Vocab source_;
  Vocab target_;
  ModelConfig config_;
  ParamStore params_;
};

// Per-tree quantities shared by every decoding step.
struct TreeContext {
  EncoderOutput enc;
  Expr H;                     // [n, D]
  std::vector<double> mask;   // additive mask d
  std::vector<std::vector<std::string>> surfaces;  // copy surface per node
};

TreeContext prepare_tree(Graph& g, Model& model, const TokenTypeTree& tree);

struct DecoderState {
  Expr z;
  Expr c;
  // Decay after the most recent update; the next step scores with
  // decay_update(lambda, none, gamma).
  std::vector<double> lambda;
  std::size_t prev_token = Vocab::kBos;
  std::size_t step = 0;
};

DecoderState initial_state(Graph& g, const Model& model, const TreeContext& ctx);

struct StepOutput {
  Attention att;
  Expr op;                    // [2]: copy, generate
  Expr gen;                   // [V]
  std::optional<Expr> copy;   // [n]; empty when no node can be copied
  std::vector<double> lambda; // decay used by this step
};

// Runs the recurrence from state.prev_token and scores both stages.
StepOutput decoder_step(Graph& g, Model& model, const TreeContext& ctx, DecoderState& state);

// Probability of an operation after the copy-infeasible fallback.
double effective_op_prob(const StepOutput& out, std::size_t op);

// Records the action taken at this step: decays lambda (resetting the copied
// node) and sets the token fed to the next step.
void advance(DecoderState& state, const Model& model, std::optional<std::size_t> copied,
             std::optional<std::size_t> fed_token);

struct Action {
  std::size_t op = kOpGenerate;
  std::size_t choice = 0;  // node id for copy, target id for generate
  std::vector<std::string> emitted;
};

struct Trajectory {
  std::vector<Action> actions;
  std::vector<std::string> tokens;
  // log p(a_m) + log p(y_m | a_m) per action.
  std::vector<double> step_logp;
  bool reached_eos = false;
};

// Greedy decoding: argmax operation, then argmax within the chosen branch.
// With `trace` set, writes one JSON object per step.
Trajectory decode_greedy(Model& model, const TokenTypeTree& tree, std::size_t max_len,
                         std::ostream* trace = nullptr);

// Gumbel-Max sampling at both stages.
Trajectory decode_sample(Model& model, const TokenTypeTree& tree, std::size_t max_len, Rng& rng,
                         std::ostream* trace = nullptr);

struct SampledPath {
  Trajectory trajectory;
  std::vector<Expr> step_logp;  // differentiable counterparts of trajectory.step_logp
};

// decode_sample on a caller-owned graph, keeping the log-probability nodes.
SampledPath sample_on_graph(Graph& g, Model& model, const TokenTypeTree& tree,
                            std::size_t max_len, Rng& rng, std::ostream* trace = nullptr);

// Step log-probabilities of a recorded action sequence, recomputed from scratch.
std::vector<double> rescore(Model& model, const TokenTypeTree& tree,
                            const std::vector<Action>& actions);

// Index of argmax(log p_i + G_i) with G_i standard Gumbel noise.
std::size_t gumbel_max(const std::vector<double>& probs, Rng& rng);

}  // namespace tag
