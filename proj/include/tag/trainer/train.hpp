#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tag/corpus/example.hpp"
#include "tag/metrics/metrics.hpp"
#include "tag/model/model.hpp"
#include "tag/trainer/config.hpp"

namespace tag {

struct EvalResult {
  CorpusReport report;
  double token_accuracy = 0.0;
  double mean_reward = 0.0;  // mean sentence reward under the configured metric
  std::vector<Tokens> candidates;
};

// Greedy-decodes every example and scores it. Token accuracy counts
// position-wise matches over max(|candidate|, |reference|).
EvalResult evaluate_model(Model& model, const std::vector<Example>& examples,
                          std::size_t max_len, RewardMetric metric = RewardMetric::kBleu4);

struct MetricsRow {
  std::size_t step = 0;
  double mu = 1.0;
  double loss_mle = 0.0;
  double loss_hrl = 0.0;
  double reward_mean = 0.0;
  std::optional<CorpusReport> dev;
};

inline constexpr const char* kMetricsCsvHeader =
    "step,mu,loss_mle,loss_hrl,reward_mean,dev_bleu4,dev_rouge2,dev_rougeL";
std::string metrics_csv_line(const MetricsRow& row);

struct TrainOutputs {
  // When set, "<dir>/best.ckpt" and "<dir>/last.ckpt" are written.
  std::string checkpoint_dir;
  std::ostream* metrics_csv = nullptr;  // header + one line per step
  std::ostream* log = nullptr;          // human-readable progress
};

struct TrainResult {
  std::size_t steps = 0;
  std::vector<MetricsRow> rows;
  double best_dev_bleu = -1.0;
  std::size_t best_step = 0;
  std::size_t impossible_steps = 0;  // zero-probability targets seen under MLE
};

// Runs config.steps optimizer steps of mixed-loss Adam training starting from
// the model's current parameters. Dev evaluation (greedy decode) happens
// every eval_every steps and after the last step; when `dev` is empty the
// training set is evaluated instead. Throws NumericError on a non-finite loss
// or parameter, leaving previously written checkpoints untouched.
TrainResult train(Model& model, const std::vector<Example>& train_set,
                  const std::vector<Example>& dev, const TrainConfig& config,
                  const TrainOutputs& outputs = {});

}  // namespace tag
