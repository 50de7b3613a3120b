#include "tag/metrics/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

#include "tag/error.hpp"

namespace tag {

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const Tokens& t, std::size_t n) {
  NgramCounts out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) {
    ++out[std::vector<std::string>(t.begin() + static_cast<std::ptrdiff_t>(i),
                                   t.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

// Clipped matches and candidate n-gram total.
std::pair<std::size_t, std::size_t> clipped(const Tokens& cand, const Tokens& ref, std::size_t n) {
  const NgramCounts c = ngrams(cand, n);
  const NgramCounts r = ngrams(ref, n);
  std::size_t match = 0, total = 0;
  for (const auto& [g, k] : c) {
    total += k;
    if (auto it = r.find(g); it != r.end()) match += std::min(k, it->second);
  }
  return {match, total};
}

struct BleuStats {
  std::size_t match[4] = {0, 0, 0, 0};
  std::size_t total[4] = {0, 0, 0, 0};
  std::size_t cand_len = 0;
  std::size_t ref_len = 0;
};

void accumulate(BleuStats& s, const Tokens& cand, const Tokens& ref) {
  for (std::size_t n = 1; n <= 4; ++n) {
    auto [m, t] = clipped(cand, ref, n);
    s.match[n - 1] += m;
    s.total[n - 1] += t;
  }
  s.cand_len += cand.size();
  s.ref_len += ref.size();
}

MetricScore bleu_from_stats(const BleuStats& s, Smoothing smoothing) {
  MetricScore out;
  out.components.assign(5, 0.0);
  if (s.cand_len == 0) return out;
  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 0; n < 4; ++n) {
    double num = static_cast<double>(s.match[n]);
    double den = static_cast<double>(s.total[n]);
    if (smoothing == Smoothing::kAddOne && n > 0) {
      num += 1.0;
      den += 1.0;
    }
    const double p = den > 0.0 ? num / den : 0.0;
    out.components[n] = p;
    if (p <= 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p);
    }
  }
  const double c = static_cast<double>(s.cand_len);
  const double r = static_cast<double>(s.ref_len);
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  out.components[4] = bp;
  out.value = zero ? 0.0 : bp * std::exp(log_sum / 4.0);
  // exp(log) round trips can land a hair above 1 for perfect matches.
  out.value = std::min(out.value, 1.0);
  return out;
}

MetricScore rouge_score(double overlap, double ref_count, double cand_count,
                        RougeVariant variant) {
  MetricScore out;
  const double recall = ref_count > 0 ? overlap / ref_count : 0.0;
  const double precision = cand_count > 0 ? overlap / cand_count : 0.0;
  const double f = recall + precision > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  out.components = {recall, precision, f};
  out.value = variant == RougeVariant::kRecall ? recall : f;
  return out;
}

}  // namespace

MetricScore bleu4(const Tokens& candidate, const Tokens& reference, Smoothing smoothing) {
  if (reference.empty()) throw ValidationError("BLEU: empty reference");
  BleuStats s;
  accumulate(s, candidate, reference);
  return bleu_from_stats(s, smoothing);
}

MetricScore rouge2(const Tokens& candidate, const Tokens& reference, RougeVariant variant) {
  if (reference.size() < 2) {
    MetricScore out;
    out.components = {0.0, 0.0, 0.0};
    out.degenerate = true;
    return out;
  }
  const auto [match, cand_total] = clipped(candidate, reference, 2);
  return rouge_score(static_cast<double>(match), static_cast<double>(reference.size() - 1),
                     static_cast<double>(cand_total), variant);
}

MetricScore rougeL(const Tokens& candidate, const Tokens& reference, RougeVariant variant) {
  if (candidate.empty() || reference.empty()) return rouge_score(0, 0, 0, variant);
  std::vector<std::size_t> prev(reference.size() + 1, 0), cur(reference.size() + 1, 0);
  for (std::size_t i = 1; i <= candidate.size(); ++i) {
    for (std::size_t j = 1; j <= reference.size(); ++j) {
      cur[j] = candidate[i - 1] == reference[j - 1] ? prev[j - 1] + 1
                                                     : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return rouge_score(static_cast<double>(prev[reference.size()]),
                     static_cast<double>(reference.size()), static_cast<double>(candidate.size()),
                     variant);
}

CorpusReport corpus_eval(const std::vector<Tokens>& candidates,
                         const std::vector<Tokens>& references, const CorpusOptions& options) {
  if (candidates.size() != references.size()) {
    throw ValidationError("corpus_eval: " + std::to_string(candidates.size()) +
                          " candidates vs " + std::to_string(references.size()) + " references");
  }
  if (candidates.empty()) throw ValidationError("corpus_eval: no pairs");
  BleuStats s;
  double r2 = 0.0, rl = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (references[i].empty()) {
      throw ValidationError("corpus_eval: empty reference at pair " + std::to_string(i + 1));
    }
    accumulate(s, candidates[i], references[i]);
    r2 += rouge2(candidates[i], references[i], options.rouge_variant).value;
    rl += rougeL(candidates[i], references[i], options.rouge_variant).value;
  }
  const double n = static_cast<double>(candidates.size());
  CorpusReport out;
  out.bleu4 = bleu_from_stats(s, options.bleu_smoothing).value;
  out.rouge2 = r2 / n;
  out.rougeL = rl / n;
  out.pairs = candidates.size();
  return out;
}

std::string format_report(const CorpusReport& report, const std::string& label) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-12s %8s %8s %8s\n", "Model", "BLEU-4", "ROUGE-2", "ROUGE-L");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-12s %8.1f %8.1f %8.1f\n", label.empty() ? "-" : label.c_str(),
                report.bleu4 * 100.0, report.rouge2 * 100.0, report.rougeL * 100.0);
  out += buf;
  return out;
}

RewardMetric parse_reward_metric(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (c != '-' && c != '_') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s == "bleu4" || s == "bleu" || s == "b") return RewardMetric::kBleu4;
  if (s == "rougel" || s == "rouge" || s == "r") return RewardMetric::kRougeL;
  throw ConfigError("unknown reward metric '" + name + "' (expected bleu4 or rougeL)");
}

std::string reward_metric_name(RewardMetric m) {
  return m == RewardMetric::kBleu4 ? "bleu4" : "rougeL";
}

double sentence_reward(const Tokens& candidate, const Tokens& reference, RewardMetric metric) {
  const double v = metric == RewardMetric::kBleu4 ? bleu4(candidate, reference).value
                                                  : rougeL(candidate, reference).value;
  constexpr double kGrid = 0x1.0p40;
  return std::round(v * kGrid) / kGrid;
}

}  // namespace tag
