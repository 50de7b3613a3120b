#include "tag/model/model.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "tag/corpus/example.hpp"
#include "tag/corpus/tokenizer.hpp"
#include "tag/error.hpp"

namespace tag {

Model::Model(Grammar grammar, Vocab source, Vocab target, ModelConfig config)
    : grammar_(std::move(grammar)),
      source_(std::move(source)),
      target_(std::move(target)),
      config_(config) {
  grammar_.check();
  check_decoder_config(config_.decoder);
  if (config_.hidden == 0) throw ConfigError("hidden size must be >= 1");
}

void Model::init(std::uint64_t seed) {
  params_ = ParamStore();
  Rng rng(seed);
  register_encoder_params(params_, grammar_, source_.size(), encoder_config(), rng);
  register_decoder_params(params_, target_.size(), config_.hidden, rng);
}

TreeContext prepare_tree(Graph& g, Model& model, const TokenTypeTree& tree) {
  TreeContext ctx;
  ctx.enc = encode_tree(g, model.params(), tree, model.grammar(), model.source(),
                        model.encoder_config());
  ctx.H = stack(ctx.enc.h);
  ctx.mask = build_mask(tree, model.grammar(), model.config().decoder.use_mask);
  ctx.surfaces.reserve(tree.size());
  for (const auto& n : tree.nodes()) ctx.surfaces.push_back(copy_surface(n));
  return ctx;
}

DecoderState initial_state(Graph& g, const Model& model, const TreeContext& ctx) {
  DecoderState s;
  s.z = ctx.enc.root();
  s.c = g.constant(Tensor({model.config().hidden}));
  s.lambda.assign(ctx.enc.h.size(), 0.0);
  return s;
}

StepOutput decoder_step(Graph& g, Model& model, const TreeContext& ctx, DecoderState& state) {
  const DecoderConfig& dc = model.config().decoder;
  auto [z, c] = step_recurrence(g, model.params(), state.z, state.c, state.prev_token);
  state.z = z;
  state.c = c;

  StepOutput out;
  out.att = attend(g, model.params(), ctx.H, z);
  out.op = operation_distribution(g, model.params(), out.att.q);
  out.gen = generation_distribution(g, model.params(), out.att.q);
  out.lambda = dc.use_decay ? decay_update(state.lambda, std::nullopt, dc.gamma)
                            : std::vector<double>(state.lambda.size(), 0.0);
  if (dc.allow_copy) out.copy = copy_distribution(ctx.H, out.att.q, copy_weights(ctx.mask, out.lambda));
  return out;
}

double effective_op_prob(const StepOutput& out, std::size_t op) {
  if (!out.copy) return op == kOpGenerate ? 1.0 : 0.0;
  return out.op.value()[op];
}

void advance(DecoderState& state, const Model& model, std::optional<std::size_t> copied,
             std::optional<std::size_t> fed_token) {
  const DecoderConfig& dc = model.config().decoder;
  if (dc.use_decay) state.lambda = decay_update(state.lambda, copied, dc.gamma);
  if (fed_token) state.prev_token = *fed_token;
  ++state.step;
}

std::size_t gumbel_max(const std::vector<double>& probs, Rng& rng) {
  std::size_t best = 0;
  double best_key = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    if (probs[i] <= 0.0) continue;
    const double key = std::log(probs[i]) - std::log(-std::log(u));
    if (!found || key > best_key) {
      best = i;
      best_key = key;
      found = true;
    }
  }
  if (!found) throw NumericError("gumbel_max: distribution has no positive entry");
  return best;
}

namespace {

std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

// (op, choice) for the current step.
using Chooser = std::function<std::pair<std::size_t, std::size_t>(const StepOutput&)>;

void write_trace(std::ostream& out, const StepOutput& s, std::size_t step, const Action& a,
                 const std::string& word) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["step"] = step;
  j["alpha"] = s.att.alpha.value().values();
  j["op"] = {effective_op_prob(s, kOpCopy), effective_op_prob(s, kOpGenerate)};
  j["action"] = a.op == kOpCopy ? "copy" : "generate";
  j["choice"] = a.choice;
  j["word"] = word;
  j["lambda"] = s.lambda;
  out << j.dump() << '\n';
}

SampledPath run_decoder(Graph& g, Model& model, const TokenTypeTree& tree, std::size_t max_len,
                        const Chooser& choose, bool keep_exprs, std::ostream* trace) {
  if (max_len == 0) throw ConfigError("max_len must be >= 1");
  const TreeContext ctx = prepare_tree(g, model, tree);
  DecoderState state = initial_state(g, model, ctx);
  SampledPath out;
  Trajectory& t = out.trajectory;

  for (std::size_t m = 0; m < max_len; ++m) {
    const StepOutput s = decoder_step(g, model, ctx, state);
    auto [op, choice] = choose(s);
    if (op == kOpCopy && !s.copy) op = kOpGenerate;

    Action a;
    a.op = op;
    a.choice = choice;
    const Expr& dist = op == kOpCopy ? *s.copy : s.gen;
    const double p_choice = dist.value()[choice];
    double logp = std::log(p_choice);
    if (s.copy) logp += std::log(s.op.value()[op]);
    t.step_logp.push_back(logp);
    if (keep_exprs) {
      Expr e = log(pick(dist, choice));
      if (s.copy) e = add(e, log(pick(s.op, op)));
      out.step_logp.push_back(e);
    }

    std::string word;
    std::optional<std::size_t> copied;
    std::optional<std::size_t> fed;
    if (op == kOpCopy) {
      a.emitted = ctx.surfaces.at(choice);
      copied = choice;
      word = join_tokens(a.emitted);
      if (!a.emitted.empty()) fed = model.target().id(a.emitted.back());
    } else {
      word = model.target().token(choice);
      if (choice != Vocab::kEos) {
        a.emitted = {word};
        fed = choice;
      }
    }
    if (trace) write_trace(*trace, s, m, a, word);
    t.tokens.insert(t.tokens.end(), a.emitted.begin(), a.emitted.end());
    const bool eos = op == kOpGenerate && choice == Vocab::kEos;
    t.actions.push_back(std::move(a));
    if (eos) {
      t.reached_eos = true;
      break;
    }
    advance(state, model, copied, fed);
  }
  return out;
}

}  // namespace

Trajectory decode_greedy(Model& model, const TokenTypeTree& tree, std::size_t max_len,
                         std::ostream* trace) {
  Graph g;
  auto choose = [](const StepOutput& s) -> std::pair<std::size_t, std::size_t> {
    if (s.copy && s.op.value()[kOpCopy] >= s.op.value()[kOpGenerate]) {
      return {kOpCopy, argmax(s.copy->value().values())};
    }
    return {kOpGenerate, argmax(s.gen.value().values())};
  };
  return run_decoder(g, model, tree, max_len, choose, false, trace).trajectory;
}

SampledPath sample_on_graph(Graph& g, Model& model, const TokenTypeTree& tree,
                            std::size_t max_len, Rng& rng, std::ostream* trace) {
  auto choose = [&rng](const StepOutput& s) -> std::pair<std::size_t, std::size_t> {
    std::size_t op = kOpGenerate;
    if (s.copy) op = gumbel_max(s.op.value().values(), rng);
    const Expr& dist = op == kOpCopy ? *s.copy : s.gen;
    return {op, gumbel_max(dist.value().values(), rng)};
  };
  return run_decoder(g, model, tree, max_len, choose, true, trace);
}

Trajectory decode_sample(Model& model, const TokenTypeTree& tree, std::size_t max_len, Rng& rng,
                         std::ostream* trace) {
  Graph g;
  return sample_on_graph(g, model, tree, max_len, rng, trace).trajectory;
}

std::vector<double> rescore(Model& model, const TokenTypeTree& tree,
                            const std::vector<Action>& actions) {
  if (actions.empty()) return {};
  Graph g;
  std::size_t m = 0;
  auto choose = [&](const StepOutput& s) -> std::pair<std::size_t, std::size_t> {
    const Action& a = actions.at(m++);
    if (a.op == kOpCopy && !s.copy) throw ValidationError("rescore: copy action is infeasible");
    return {a.op, a.choice};
  };
  return run_decoder(g, model, tree, actions.size(), choose, false, nullptr).trajectory.step_logp;
}

}  // namespace tag
