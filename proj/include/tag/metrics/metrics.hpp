#pragma once

#include <string>
#include <vector>

namespace tag {

using Tokens = std::vector<std::string>;

enum class Smoothing { kNone, kAddOne };
// ROUGE variant; F1 by default, recall-only is configurable.
enum class RougeVariant { kF1, kRecall };

struct MetricScore {
  double value = 0.0;
  // BLEU: p1..p4 then brevity penalty. ROUGE: recall, precision, F1.
  std::vector<double> components;
  // Score defined by convention rather than computed (e.g. ROUGE-2 with a
  // one-token reference).
  bool degenerate = false;
};

// Add-one smoothing adds 1 to numerator and denominator of the n > 1
// precisions. Empty reference throws ValidationError; empty candidate is 0.
MetricScore bleu4(const Tokens& candidate, const Tokens& reference,
                  Smoothing smoothing = Smoothing::kAddOne);
MetricScore rouge2(const Tokens& candidate, const Tokens& reference,
                   RougeVariant variant = RougeVariant::kF1);
MetricScore rougeL(const Tokens& candidate, const Tokens& reference,
                   RougeVariant variant = RougeVariant::kF1);

struct CorpusOptions {
  Smoothing bleu_smoothing = Smoothing::kNone;
  RougeVariant rouge_variant = RougeVariant::kF1;
};

// Values in [0, 1]. BLEU pools n-gram counts and lengths over the corpus;
// ROUGE scores are macro-averaged sentence scores.
struct CorpusReport {
  double bleu4 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  std::size_t pairs = 0;
};

CorpusReport corpus_eval(const std::vector<Tokens>& candidates,
                         const std::vector<Tokens>& references, const CorpusOptions& options = {});

// Scores x100 with one decimal under a BLEU-4 / ROUGE-2 / ROUGE-L header.
std::string format_report(const CorpusReport& report, const std::string& label = "");

enum class RewardMetric { kBleu4, kRougeL };
RewardMetric parse_reward_metric(const std::string& name);
std::string reward_metric_name(RewardMetric m);

// Sentence-level reward in [0, 1]: smoothed BLEU-4 or ROUGE-L F1, rounded to
// a multiple of 2^-40 so that differences of rewards sum back exactly.
double sentence_reward(const Tokens& candidate, const Tokens& reference, RewardMetric metric);

}  // namespace tag
