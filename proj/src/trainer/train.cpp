#include "tag/trainer/train.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <random>

#include "tag/corpus/batch.hpp"
#include "tag/error.hpp"
#include "tag/numcore/checkpoint.hpp"
#include "tag/trainer/losses.hpp"

namespace tag {

EvalResult evaluate_model(Model& model, const std::vector<Example>& examples,
                          std::size_t max_len, RewardMetric metric) {
  if (examples.empty()) throw ValidationError("evaluation set is empty");
  EvalResult out;
  std::vector<Tokens> refs;
  std::size_t matches = 0, total = 0;
  double reward = 0.0;
  for (const Example& ex : examples) {
    Tokens cand = decode_greedy(model, ex.tree, max_len).tokens;
    const Tokens& ref = ex.comment;
    for (std::size_t i = 0; i < std::min(cand.size(), ref.size()); ++i) {
      if (cand[i] == ref[i]) ++matches;
    }
    total += std::max(cand.size(), ref.size());
    reward += sentence_reward(cand, ref, metric);
    out.candidates.push_back(std::move(cand));
    refs.push_back(ref);
  }
  out.report = corpus_eval(out.candidates, refs);
  out.token_accuracy = total ? static_cast<double>(matches) / static_cast<double>(total) : 1.0;
  out.mean_reward = reward / static_cast<double>(examples.size());
  return out;
}

std::string metrics_csv_line(const MetricsRow& r) {
  char buf[512];
  if (r.dev) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.step, r.mu,
                  r.loss_mle, r.loss_hrl, r.reward_mean, r.dev->bleu4, r.dev->rouge2,
                  r.dev->rougeL);
  } else {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,,,", r.step, r.mu, r.loss_mle,
                  r.loss_hrl, r.reward_mean);
  }
  return buf;
}

namespace {

bool params_finite(const ParamStore& store) {
  for (const auto& [_, t] : store.entries()) {
    if (!t.all_finite()) return false;
  }
  return true;
}

Rng step_rng(std::uint64_t seed, std::size_t step) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                    0x7a9u};
  return Rng(seq);
}

}  // namespace

TrainResult train(Model& model, const std::vector<Example>& train_set,
                  const std::vector<Example>& dev, const TrainConfig& config,
                  const TrainOutputs& outputs) {
  validate_config(config);
  if (train_set.empty()) throw ValidationError("training set is empty");
  const std::vector<Example>& eval_set = dev.empty() ? train_set : dev;
  namespace fs = std::filesystem;
  const bool write_ckpt = !outputs.checkpoint_dir.empty();
  if (write_ckpt) fs::create_directories(outputs.checkpoint_dir);
  auto ckpt_path = [&](const char* name) {
    return (fs::path(outputs.checkpoint_dir) / name).string();
  };

  ParamStore& params = model.params();
  params.zero_grad();
  AdamState adam;
  Baseline baseline{0.0, config.baseline_decay};
  TrainResult result;
  if (outputs.metrics_csv) *outputs.metrics_csv << kMetricsCsvHeader << '\n';

  std::size_t step = 0;
  for (std::size_t epoch = 0; step < config.steps; ++epoch) {
    for (const Batch& batch : batch_iter(train_set.size(), config.batch_size, epoch, config.seed)) {
      if (step >= config.steps) break;
      const double mu = mu_schedule(step, config.tt, config.mle_only);
      Rng rng = step_rng(config.seed, step);
      MetricsRow row;
      row.step = step + 1;
      row.mu = mu;
      const double inv = 1.0 / static_cast<double>(batch.indices.size());
      bool any_hrl = false;
      for (std::size_t idx : batch.indices) {
        Graph g;
        MixedResult r = mixed_loss(g, model, train_set[idx], mu, rng, baseline.value,
                                   config.reward, config.max_len, config.samples);
        const double total = r.loss.scalar();
        if (!std::isfinite(total)) {
          throw NumericError("non-finite loss at step " + std::to_string(step + 1) +
                             " (example " + std::to_string(idx) + ")");
        }
        result.impossible_steps += r.impossible_steps.size();
        row.loss_mle += r.mle * inv;
        row.loss_hrl += r.hrl * inv;
        row.reward_mean += r.reward * inv;
        any_hrl = any_hrl || r.used_hrl;
        g.backward(scale(r.loss, inv));
      }
      if (config.grad_clip > 0.0) params.clip_grad_norm(config.grad_clip);
      adam_step(params, adam, config.lr, 0.9, 0.999, 1e-8);
      if (!params_finite(params)) {
        throw NumericError("non-finite parameter after step " + std::to_string(step + 1));
      }
      if (any_hrl) baseline.update(row.reward_mean);
      ++step;

      if (step % config.eval_every == 0 || step == config.steps) {
        const EvalResult ev = evaluate_model(model, eval_set, config.max_len, config.reward);
        row.dev = ev.report;
        if (ev.report.bleu4 > result.best_dev_bleu) {
          result.best_dev_bleu = ev.report.bleu4;
          result.best_step = step;
          if (write_ckpt) save_checkpoint(ckpt_path("best.ckpt"), params);
        }
        if (write_ckpt) save_checkpoint(ckpt_path("last.ckpt"), params);
        if (outputs.log) {
          char buf[256];
          std::snprintf(buf, sizeof buf,
                        "step %zu mu %.3f mle %.4f hrl %.4f reward %.4f dev BLEU-4 %.1f "
                        "ROUGE-2 %.1f ROUGE-L %.1f\n",
                        step, mu, row.loss_mle, row.loss_hrl, row.reward_mean,
                        ev.report.bleu4 * 100, ev.report.rouge2 * 100, ev.report.rougeL * 100);
          *outputs.log << buf << std::flush;
        }
      }
      if (outputs.metrics_csv) *outputs.metrics_csv << metrics_csv_line(row) << '\n';
      result.rows.push_back(row);
    }
  }
  result.steps = step;
  if (outputs.metrics_csv) outputs.metrics_csv->flush();
  return result;
}

}  // namespace tag
