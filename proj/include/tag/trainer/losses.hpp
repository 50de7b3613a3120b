#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tag/corpus/alignment.hpp"
#include "tag/corpus/example.hpp"
#include "tag/metrics/metrics.hpp"
#include "tag/model/model.hpp"
#include "tag/numcore/graph.hpp"

namespace tag {

// Loss added (without gradient) for each target step that neither branch can
// produce.
inline constexpr double kZeroProbPenalty = 1000.0;

struct MleResult {
  Expr loss;
  double value = 0.0;
  std::vector<std::size_t> impossible_steps;  // target positions with zero probability
};

// Alignment options implied by the model's switches.
AlignmentOptions alignment_options(const Model& model);

// Teacher-forced negative log-likelihood with the operation marginalised:
// p(y_m) = p(gen) p_gen(y_m) + p(copy) sum of p_copy over nodes whose surface
// equals the aligned span.
MleResult mle_loss(Graph& g, Model& model, const Example& example);

// r_m = R(prefix through action m) - R(prefix before m), R(empty) = 0.
// `emitted[m]` are the tokens action m produced.
std::vector<double> shaped_rewards(const std::vector<std::vector<std::string>>& emitted,
                                   const Tokens& reference, RewardMetric metric);

// Exponential moving average of trajectory rewards.
struct Baseline {
  double value = 0.0;
  double decay = 0.9;
  void update(double batch_mean) { value = decay * value + (1.0 - decay) * batch_mean; }
};

struct HrlResult {
  Expr loss;
  double value = 0.0;
  double reward = 0.0;  // final sentence reward of the sampled trajectory
  Trajectory trajectory;
  std::vector<double> rewards;
};

// One sampled trajectory; surrogate -sum_m (log p(a_m) + log p(y_m|a_m)) * A_m
// with A_m the reward-to-go from m minus the baseline.
HrlResult hrl_loss(Graph& g, Model& model, const Example& example, Rng& rng, double baseline,
                   RewardMetric metric, std::size_t max_len);

// mu = 1 - tr / tt clamped to [0, 1]; mle_only pins 1.
double mu_schedule(std::size_t tr, std::size_t tt, bool mle_only);

struct MixedResult {
  Expr loss;
  double mu = 1.0;
  double mle = 0.0;
  double hrl = 0.0;
  double reward = 0.0;
  bool used_hrl = false;
  std::vector<std::size_t> impossible_steps;
};

// mu * mle + (1 - mu) * hrl averaged over `samples` trajectories. A component
// whose weight is zero is not computed.
MixedResult mixed_loss(Graph& g, Model& model, const Example& example, double mu, Rng& rng,
                       double baseline, RewardMetric metric, std::size_t max_len,
                       std::size_t samples = 1);

}  // namespace tag
