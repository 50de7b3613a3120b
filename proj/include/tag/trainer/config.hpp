#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include "tag/metrics/metrics.hpp"
#include "tag/model/model.hpp"

namespace tag {

struct TrainConfig {
  std::string grammar = "wikisql";
  std::size_t hidden = 64;
  double lr = 0.001;
  std::size_t batch_size = 32;
  std::size_t steps = 1000;  // optimizer steps to run
  std::size_t tt = 1000;     // mu schedule length
  double gamma = 0.5;
  RewardMetric reward = RewardMetric::kBleu4;
  std::size_t src_min_freq = 4;
  std::size_t tgt_min_freq = 4;
  std::uint64_t seed = 1;
  bool no_type_assoc = false;
  bool no_mask = false;
  bool no_decay = false;
  bool mle_only = false;
  bool no_copy = false;  // generate-only baseline: no copy branch at all
  bool k_tied = false;
  double grad_clip = 0.0;  // 0 disables clipping
  double baseline_decay = 0.9;
  std::size_t max_len = 40;
  std::size_t eval_every = 50;
  std::size_t samples = 1;  // sampled trajectories per example for the RL term
};

// Every key accepted by the config file and flag overrides.
const std::map<std::string, std::string>& config_key_help();

// Applies one key=value pair. Throws ConfigError on unknown keys or bad values.
void set_config_value(TrainConfig& config, const std::string& key, const std::string& value);

// Line-oriented key=value; '#' starts a comment. Unknown keys are rejected.
TrainConfig parse_config(const std::string& text, TrainConfig base = {});
TrainConfig load_config(const std::string& path, TrainConfig base = {});

// Checks the invariants (tt >= 1, lr > 0, gamma in (0,1), ...).
void validate_config(const TrainConfig& config);

// key=value lines for every field, in a fixed order.
std::string config_to_text(const TrainConfig& config);

ModelConfig model_config(const TrainConfig& config);

}  // namespace tag
