#include "tag/trainer/losses.hpp"

#include <cmath>

#include "tag/error.hpp"

namespace tag {

AlignmentOptions alignment_options(const Model& model) {
  AlignmentOptions o;
  o.use_mask = model.config().decoder.use_mask;
  o.allow_copy = model.config().decoder.allow_copy;
  o.oov_as_unk = !model.config().decoder.allow_copy;
  return o;
}

MleResult mle_loss(Graph& g, Model& model, const Example& example) {
  const auto segments = align_target(example.tree, model.grammar(), example.comment,
                                     model.target(), alignment_options(model));
  const TreeContext ctx = prepare_tree(g, model, example.tree);
  DecoderState state = initial_state(g, model, ctx);

  MleResult out;
  std::vector<Expr> nll;
  double penalty = 0.0;
  for (const TargetSegment& seg : segments) {
    const StepOutput s = decoder_step(g, model, ctx, state);
    std::vector<Expr> parts;
    if (seg.gen_id >= 0) {
      Expr p = pick(s.gen, static_cast<std::size_t>(seg.gen_id));
      if (s.copy) p = mul(pick(s.op, kOpGenerate), p);
      parts.push_back(p);
    }
    std::optional<std::size_t> copied;
    if (s.copy && !seg.copy_nodes.empty()) {
      const Tensor& pc = s.copy->value();
      std::vector<Expr> picks;
      for (std::size_t node : seg.copy_nodes) {
        if (pc[node] <= 0.0) continue;
        picks.push_back(pick(*s.copy, node));
        if (!copied || pc[node] > pc[*copied]) copied = node;
      }
      if (!picks.empty()) {
        const Expr total = picks.size() == 1 ? picks[0] : add_all(picks);
        parts.push_back(mul(pick(s.op, kOpCopy), total));
      }
    }
    const Expr p = parts.empty() ? Expr() : parts.size() == 1 ? parts[0] : add(parts[0], parts[1]);
    if (!p.valid() || !(p.scalar() > 0.0)) {
      out.impossible_steps.push_back(seg.start);
      penalty += kZeroProbPenalty;
    } else {
      nll.push_back(log(p));
    }
    if (seg.length == 0) break;  // end-of-sequence segment
    advance(state, model, copied, model.target().id(seg.last_token));
  }
  Expr loss = nll.empty() ? g.scalar(0.0) : scale(nll.size() == 1 ? nll[0] : add_all(nll), -1.0);
  if (penalty > 0.0) loss = add(loss, g.scalar(penalty));
  out.loss = loss;
  out.value = loss.scalar();
  return out;
}

std::vector<double> shaped_rewards(const std::vector<std::vector<std::string>>& emitted,
                                   const Tokens& reference, RewardMetric metric) {
  std::vector<double> out;
  out.reserve(emitted.size());
  Tokens prefix;
  double prev = 0.0;
  for (const auto& tokens : emitted) {
    prefix.insert(prefix.end(), tokens.begin(), tokens.end());
    const double cur = prefix.empty() ? 0.0 : sentence_reward(prefix, reference, metric);
    out.push_back(cur - prev);
    prev = cur;
  }
  return out;
}

HrlResult hrl_loss(Graph& g, Model& model, const Example& example, Rng& rng, double baseline,
                   RewardMetric metric, std::size_t max_len) {
  SampledPath path = sample_on_graph(g, model, example.tree, max_len, rng);
  HrlResult out;
  std::vector<std::vector<std::string>> emitted;
  for (const auto& a : path.trajectory.actions) emitted.push_back(a.emitted);
  out.rewards = shaped_rewards(emitted, example.comment, metric);
  for (double r : out.rewards) out.reward += r;

  std::vector<Expr> terms;
  double to_go = out.reward;
  for (std::size_t m = 0; m < path.step_logp.size(); ++m) {
    const double advantage = to_go - baseline;
    terms.push_back(scale(path.step_logp[m], -advantage));
    to_go -= out.rewards[m];
  }
  out.loss = terms.empty() ? g.scalar(0.0) : terms.size() == 1 ? terms[0] : add_all(terms);
  out.value = out.loss.scalar();
  out.trajectory = std::move(path.trajectory);
  return out;
}

double mu_schedule(std::size_t tr, std::size_t tt, bool mle_only) {
  if (mle_only) return 1.0;
  if (tt == 0) throw ConfigError("tt must be >= 1");
  if (tr >= tt) return 0.0;
  return 1.0 - static_cast<double>(tr) / static_cast<double>(tt);
}

MixedResult mixed_loss(Graph& g, Model& model, const Example& example, double mu, Rng& rng,
                       double baseline, RewardMetric metric, std::size_t max_len,
                       std::size_t samples) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("mu must lie in [0, 1]");
  if (samples == 0) throw ConfigError("samples must be >= 1");
  MixedResult out;
  out.mu = mu;
  std::vector<Expr> parts;
  if (mu > 0.0) {
    MleResult mle = mle_loss(g, model, example);
    out.mle = mle.value;
    out.impossible_steps = std::move(mle.impossible_steps);
    parts.push_back(mu == 1.0 ? mle.loss : scale(mle.loss, mu));
  }
  if (mu < 1.0) {
    out.used_hrl = true;
    std::vector<Expr> hs;
    for (std::size_t k = 0; k < samples; ++k) {
      HrlResult h = hrl_loss(g, model, example, rng, baseline, metric, max_len);
      out.hrl += h.value / static_cast<double>(samples);
      out.reward += h.reward / static_cast<double>(samples);
      hs.push_back(h.loss);
    }
    Expr h = hs.size() == 1 ? hs[0] : scale(add_all(hs), 1.0 / static_cast<double>(samples));
    parts.push_back(mu == 0.0 ? h : scale(h, 1.0 - mu));
  }
  out.loss = parts.size() == 1 ? parts[0] : add(parts[0], parts[1]);
  return out;
}

}  // namespace tag
