// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Arguments select a subset by number; no arguments runs all of them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "model_fixtures.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "train_fixtures.hpp"
#include "tree_lstm_oracle.hpp"
#include "tag/metrics/metrics.hpp"
#include "tag/trainer/gradcheck_suite.hpp"
#include "tag/trainer/losses.hpp"
#include "tag/trainer/train.hpp"
#include "tag/treelang/parsers.hpp"

using namespace tag;

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// 1 ---------------------------------------------------------------------------

Outcome gradient_suite() {
  const auto t0 = Clock::now();
  const auto entries = run_gradcheck_suite(7);
  const double secs = seconds_since(t0);
  double worst = 0.0;
  std::string worst_name;
  for (const auto& e : entries) {
    if (!(e.result.max_relative_error <= worst)) {
      worst = e.result.max_relative_error;
      worst_name = e.name;
    }
  }
  std::ostringstream d;
  d << entries.size() << " checks, worst " << fmt("%.2e", worst) << " (" << worst_name << "), "
    << fmt("%.1f", secs) << " s";
  return {worst < 1e-4 && secs < 60.0 && !entries.empty(), d.str()};
}

// 2 ---------------------------------------------------------------------------

Model model_on(const std::string& grammar, std::size_t hidden, std::uint64_t seed) {
  ModelConfig mc;
  mc.hidden = hidden;
  Model m(grammar_registry(grammar), Vocab::build({test::source_pool()}, 1), test::small_target_vocab(), mc);
  m.init(seed);
  return m;
}

Outcome distribution_invariants() {
  std::mt19937_64 rng(2024);
  std::map<std::string, Model> models;
  for (const char* g : {"wikisql", "atis"}) models.emplace(g, model_on(g, 4, 11));
  std::size_t failures = 0, distributions = 0, masked = 0, decayed = 0;
  auto sums_to_one = [&](const Tensor& p) {
    ++distributions;
    double s = 0.0;
    for (double v : p.values()) s += v;
    if (!(std::abs(s - 1.0) <= 1e-9)) ++failures;
  };

  for (int inst = 0; inst < 1000; ++inst) {
    Model& model = models.at(inst % 2 ? "atis" : "wikisql");
    DecoderConfig& dc = model.config().decoder;
    dc.use_mask = rng() % 4 != 0;
    dc.use_decay = rng() % 4 != 0;
    dc.gamma = test::uniform(rng, 0.05, 0.95);
    test::randomize(model.params(), rng, test::uniform(rng, 0.1, 3.0));
    const TokenTypeTree tree = test::random_tree(rng, model.grammar(), 2 + rng() % 10, test::source_pool());

    Graph g;
    const TreeContext ctx = prepare_tree(g, model, tree);
    DecoderState state = initial_state(g, model, ctx);
    for (int m = 0; m < 5; ++m) {
      const StepOutput s = decoder_step(g, model, ctx, state);
      sums_to_one(s.att.alpha.value());
      sums_to_one(s.op.value());
      sums_to_one(s.gen.value());
      if (!dc.use_decay) {
        for (double l : s.lambda) failures += l != 0.0;
      }
      if (s.copy) {
        const Tensor& p = s.copy->value();
        sums_to_one(p);
        for (std::size_t i = 0; i < tree.size(); ++i) {
          if (dc.use_mask && !model.grammar().is_available(tree.node(i).type)) {
            ++masked;
            failures += p[i] != 0.0;
          }
        }
      }

      // decay vector with exact ones on random nodes
      std::vector<double> lam(tree.size());
      for (auto& l : lam) l = rng() % 3 == 0 ? 1.0 : test::uniform(rng, 0.0, 0.999);
      if (const auto pc = copy_distribution(ctx.H, s.att.q, copy_weights(ctx.mask, lam))) {
        sums_to_one(pc->value());
        for (std::size_t i = 0; i < lam.size(); ++i) {
          if (lam[i] == 1.0) {
            ++decayed;
            failures += pc->value()[i] != 0.0;
          }
        }
      }

      std::optional<std::size_t> copied, fed;
      if (s.copy && rng() % 2 == 0) {
        copied = gumbel_max(s.copy->value().values(), rng);
        const auto& surface = ctx.surfaces[*copied];
        if (!surface.empty()) fed = model.target().id(surface.back());
      } else {
        fed = gumbel_max(s.gen.value().values(), rng);
        if (*fed == Vocab::kEos) break;
      }
      advance(state, model, copied, fed);
    }
  }
  std::ostringstream d;
  d << distributions << " distributions, " << masked << " masked and " << decayed
    << " fully decayed node probabilities, " << failures << " violations";
  return {failures == 0 && masked > 0 && decayed > 0, d.str()};
}

// 3 ---------------------------------------------------------------------------

struct EncoderFixture {
  Grammar grammar;
  Vocab vocab;
  EncoderConfig config;
  ParamStore store;
  EncoderFixture(const std::string& g, std::size_t hidden, bool type_assoc, std::uint64_t seed)
      : grammar(grammar_registry(g)), vocab(Vocab::build({test::source_pool()}, 1)) {
    config.hidden = hidden;
    config.type_assoc = type_assoc;
    Rng rng(seed);
    register_encoder_params(store, grammar, vocab.size(), config, rng);
  }
  std::vector<double> root(const TokenTypeTree& t) {
    Graph g;
    return encode_tree(g, store, t, grammar, vocab, config).root().value().values();
  }
};

Outcome type_sensitivity() {
  std::mt19937_64 rng(33);
  std::map<std::string, std::pair<EncoderFixture, EncoderFixture>> fx;
  for (const char* g : {"wikisql", "atis"}) {
    fx.emplace(std::piecewise_construct, std::forward_as_tuple(g),
               std::forward_as_tuple(EncoderFixture(g, 6, true, 1), EncoderFixture(g, 6, false, 2)));
  }
  int sensitive = 0, blind_equal = 0, oracle_match = 0;
  double worst_oracle = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    auto& [full, blind] = fx.at(pair % 2 ? "atis" : "wikisql");
    test::randomize(full.store, rng, 0.5);
    test::randomize(blind.store, rng, 0.5);
    const TokenTypeTree a = test::random_tree(rng, full.grammar, 2 + rng() % 9, test::source_pool());
    TokenTypeTree b = a;
    const std::vector<std::string> types(full.grammar.types.begin(), full.grammar.types.end());
    const std::size_t id = rng() % a.size();
    while (b.node(id).type == a.node(id).type) b.node(id).type = types[rng() % types.size()];

    const auto fa = full.root(a), fb = full.root(b);
    double dist = 0.0;
    for (std::size_t j = 0; j < fa.size(); ++j) dist += (fa[j] - fb[j]) * (fa[j] - fb[j]);
    sensitive += std::sqrt(dist) > 1e-8;

    const auto ba = blind.root(a), bb = blind.root(b);
    blind_equal += ba == bb;
    const oracle::TreeLstmOracle ref(blind.store, blind.vocab, 6, true);
    double diff = 0.0;
    for (const TokenTypeTree* t : {&a, static_cast<const TokenTypeTree*>(&b)}) {
      const auto mine = blind.root(*t);
      const auto want = ref.eval(*t, 0).h;
      for (std::size_t j = 0; j < mine.size(); ++j) diff = std::max(diff, std::abs(mine[j] - want[j]));
    }
    worst_oracle = std::max(worst_oracle, diff);
    oracle_match += diff <= 1e-12;
  }
  std::ostringstream d;
  d << "type-sensitive " << sensitive << "/100, ablation bitwise-equal " << blind_equal
    << "/100, oracle within 1e-12 " << oracle_match << "/100 (worst " << fmt("%.1e", worst_oracle) << ")";
  return {sensitive == 100 && blind_equal == 100 && oracle_match == 100, d.str()};
}

// 4 ---------------------------------------------------------------------------

using Grads = std::map<std::string, std::vector<double>>;

Grads collect_grads(const ParamStore& store) {
  Grads out;
  for (const auto& [name, t] : store.entries()) out[name] = t.grad();
  return out;
}

// Log-probability of a forced action sequence, built from the step
// distributions. Empty when an action is infeasible.
std::optional<Expr> path_logp(Graph& g, Model& model, const TokenTypeTree& tree,
                              const std::vector<Action>& actions) {
  const TreeContext ctx = prepare_tree(g, model, tree);
  DecoderState state = initial_state(g, model, ctx);
  std::vector<Expr> terms;
  for (const Action& a : actions) {
    const StepOutput s = decoder_step(g, model, ctx, state);
    if (a.op == kOpCopy && !s.copy) return std::nullopt;
    terms.push_back(log(pick(a.op == kOpCopy ? *s.copy : s.gen, a.choice)));
    if (s.copy) terms.push_back(log(pick(s.op, a.op)));
    std::optional<std::size_t> copied, fed;
    if (a.op == kOpCopy) {
      copied = a.choice;
      fed = model.target().id(ctx.surfaces[a.choice].back());
    } else {
      fed = a.choice;
    }
    advance(state, model, copied, fed);
  }
  return add_all(terms);
}

Outcome policy_gradient() {
  const auto t0 = Clock::now();
  // one copyable node, two target words, episodes of at most two actions
  TokenTypeTree tree("wikisql");
  tree.add_node("column_name", {"c"});
  ModelConfig mc;
  mc.hidden = 3;
  Model model(grammar_registry("wikisql"), Vocab::build({{"c"}}, 1), Vocab::build({{"a", "b"}}, 1), mc);
  model.init(4);
  std::mt19937_64 prng(4);
  test::randomize(model.params(), prng, 1.0);
  const Example ex{tree, {"a", "c"}};
  const std::size_t max_len = 2;
  const RewardMetric metric = RewardMetric::kBleu4;

  // exact gradient of E[R] = sum over every episode of p(episode) R(episode)
  std::vector<Action> single;
  single.push_back({kOpCopy, 0, {"c"}});
  for (std::size_t v = 0; v < model.target().size(); ++v) {
    Action a{kOpGenerate, v, {}};
    if (v != Vocab::kEos) a.emitted = {model.target().token(v)};
    single.push_back(a);
  }
  std::vector<std::vector<Action>> episodes;
  for (const Action& first : single) {
    if (first.op == kOpGenerate && first.choice == Vocab::kEos) {
      episodes.push_back({first});
      continue;
    }
    for (const Action& second : single) episodes.push_back({first, second});
  }
  model.params().zero_grad();
  Graph g;
  std::vector<Expr> terms;
  double total_p = 0.0, expected = 0.0;
  for (const auto& ep : episodes) {
    const auto lp = path_logp(g, model, tree, ep);
    if (!lp) continue;
    Tokens tokens;
    for (const Action& a : ep) tokens.insert(tokens.end(), a.emitted.begin(), a.emitted.end());
    const double r = tokens.empty() ? 0.0 : sentence_reward(tokens, ex.comment, metric);
    const Expr p = exp(*lp);
    total_p += p.scalar();
    expected += p.scalar() * r;
    terms.push_back(scale(p, r));
  }
  g.backward(add_all(terms));
  const Grads exact = collect_grads(model.params());

  // Monte-Carlo average of the surrogate gradient with the training baseline
  const std::size_t n = 100000;
  Grads sum, sumsq;
  for (const auto& [name, v] : exact) {
    sum[name].assign(v.size(), 0.0);
    sumsq[name].assign(v.size(), 0.0);
  }
  Rng rng(44);
  Baseline baseline{0.0, 0.9};
  double mc_reward = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    model.params().zero_grad();
    Graph gi;
    const HrlResult h = hrl_loss(gi, model, ex, rng, baseline.value, metric, max_len);
    gi.backward(h.loss);
    mc_reward += h.reward;
    baseline.update(h.reward);
    for (auto& [name, t] : model.params().entries()) {
      auto& s = sum[name];
      auto& q = sumsq[name];
      for (std::size_t k = 0; k < t.size(); ++k) {
        const double x = -t.grad()[k];  // ascent direction of E[R]
        s[k] += x;
        q[k] += x * x;
      }
    }
  }
  std::size_t coords = 0, outside = 0, informative = 0;
  double worst_z = 0.0;
  std::string worst;
  for (const auto& [name, ex_grad] : exact) {
    for (std::size_t k = 0; k < ex_grad.size(); ++k) {
      ++coords;
      const double mean = sum[name][k] / n;
      const double var = std::max(0.0, (sumsq[name][k] - n * mean * mean) / (n - 1));
      const double se = std::sqrt(var / n);
      const double diff = std::abs(mean - ex_grad[k]);
      if (se == 0.0) {
        outside += diff > 1e-12;
        continue;
      }
      ++informative;
      const double z = diff / se;
      if (z > worst_z) {
        worst_z = z;
        worst = name + "[" + std::to_string(k) + "]";
      }
      outside += z > 3.0;
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << episodes.size() << " episodes (total p " << fmt("%.12f", total_p) << "), E[R] "
    << fmt("%.4f", expected) << " vs sampled " << fmt("%.4f", mc_reward / n) << "; " << informative
    << " of " << coords << " coordinates vary, " << outside << " outside 3 SE (max "
    << fmt("%.2f", worst_z) << " SE at " << worst << "), " << fmt("%.1f", secs) << " s";
  return {outside == 0 && std::abs(total_p - 1.0) < 1e-9 && secs < 120.0, d.str()};
}

// 5 ---------------------------------------------------------------------------

Outcome telescoping() {
  std::mt19937_64 rng(55);
  int exact = 0;
  for (int i = 0; i < 1000; ++i) {
    const RewardMetric metric = i % 2 ? RewardMetric::kRougeL : RewardMetric::kBleu4;
    const Tokens ref = oracle::random_words(rng, 1, 10);
    std::vector<Tokens> emitted(1 + rng() % 10);
    Tokens all;
    for (auto& e : emitted) {
      // mostly single tokens, sometimes a multi-token copy or an empty EOS
      const std::size_t len = rng() % 5 == 0 ? rng() % 4 : 1;
      e = len ? oracle::random_words(rng, len, len) : Tokens{};
      all.insert(all.end(), e.begin(), e.end());
    }
    double total = 0.0;
    for (double r : shaped_rewards(emitted, ref, metric)) total += r;
    const double final_reward = all.empty() ? 0.0 : sentence_reward(all, ref, metric);
    exact += total == final_reward;
  }
  return {exact == 1000, std::to_string(exact) + "/1000 trajectories sum to the final reward bitwise"};
}

// 6-8 -------------------------------------------------------------------------

TrainConfig base_config() {
  TrainConfig c;
  c.grammar = "wikisql";
  c.hidden = 32;
  c.lr = 0.005;
  c.batch_size = 32;
  c.steps = 300;
  c.mle_only = true;
  c.src_min_freq = 1;
  c.tgt_min_freq = 1;
  c.seed = 1;
  c.eval_every = 300;
  return c;
}

Outcome overfit() {
  const auto t0 = Clock::now();
  const auto examples = test::synthetic_examples(30, 6);
  const TrainConfig cfg = base_config();
  Model model = test::model_for(examples, cfg);
  train(model, examples, {}, cfg);
  const EvalResult ev = evaluate_model(model, examples, cfg.max_len);
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "token accuracy " << fmt("%.3f", ev.token_accuracy) << ", BLEU-4 " << fmt("%.3f", ev.report.bleu4)
    << " after " << cfg.steps << " steps, " << fmt("%.1f", secs) << " s";
  return {ev.token_accuracy >= 0.95 && ev.report.bleu4 >= 0.90 && secs < 300.0, d.str()};
}

struct OovRun {
  std::vector<Example> train, dev;
  std::optional<Model> mle;
  EvalResult mle_dev;
};

OovRun& oov_run() {
  static OovRun run;
  if (run.mle) return run;
  const auto all = test::synthetic_examples(200, 7, "wikisql", 0.5);
  run.train.assign(all.begin(), all.begin() + 160);
  run.dev.assign(all.begin() + 160, all.end());
  const TrainConfig cfg = base_config();
  run.mle.emplace(test::model_for(run.train, cfg));
  train(*run.mle, run.train, {}, cfg);
  run.mle_dev = evaluate_model(*run.mle, run.dev, cfg.max_len);
  return run;
}

Outcome copy_necessity() {
  const auto t0 = Clock::now();
  OovRun& run = oov_run();
  TrainConfig cfg = base_config();
  cfg.no_copy = true;
  cfg.no_mask = true;
  Model plain = test::model_for(run.train, cfg);
  train(plain, run.train, {}, cfg);
  const EvalResult ev = evaluate_model(plain, run.dev, cfg.max_len);
  const double gap = 100.0 * (run.mle_dev.report.bleu4 - ev.report.bleu4);
  std::ostringstream d;
  d << "dev BLEU-4 " << fmt("%.1f", 100 * run.mle_dev.report.bleu4) << " with copy vs "
    << fmt("%.1f", 100 * ev.report.bleu4) << " generate-only (gap " << fmt("%.1f", gap) << "), "
    << fmt("%.1f", seconds_since(t0)) << " s";
  return {gap >= 10.0, d.str()};
}

Outcome hrl_effect() {
  const auto t0 = Clock::now();
  OovRun& run = oov_run();
  Model model = *run.mle;
  TrainConfig cfg = base_config();
  cfg.mle_only = false;
  cfg.tt = 500;
  cfg.steps = 500;
  cfg.lr = 0.001;
  cfg.eval_every = 100;
  train(model, run.train, run.dev, cfg);
  const EvalResult ev = evaluate_model(model, run.dev, cfg.max_len);
  std::ostringstream d;
  d << "dev mean reward " << fmt("%.4f", ev.mean_reward) << " after mixed training vs "
    << fmt("%.4f", run.mle_dev.mean_reward) << " for the MLE checkpoint, "
    << fmt("%.1f", seconds_since(t0)) << " s";
  return {ev.mean_reward >= run.mle_dev.mean_reward - 0.01, d.str()};
}

// 9 ---------------------------------------------------------------------------

Outcome metric_oracles() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  int identical_ok = 0, identical = 0;
  for (int i = 0; i < 500; ++i) {
    const Tokens cand = oracle::random_words(rng, 0, 10, 3 + i % 4);
    const Tokens ref = oracle::random_words(rng, 1, 10, 3 + i % 4);
    auto track = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
    track(bleu4(cand, ref, Smoothing::kNone).value, oracle::bleu(cand, ref, false));
    track(bleu4(cand, ref, Smoothing::kAddOne).value, oracle::bleu(cand, ref, true));
    track(rouge2(cand, ref).value, oracle::rouge2(cand, ref).second);
    track(rouge2(cand, ref, RougeVariant::kRecall).value, oracle::rouge2(cand, ref).first);
    track(rougeL(cand, ref).value, oracle::rougeL(cand, ref).second);
    track(rougeL(cand, ref, RougeVariant::kRecall).value, oracle::rougeL(cand, ref).first);

    const Tokens same = oracle::random_words(rng, 4, 10);
    identical += 4;
    identical_ok += bleu4(same, same, Smoothing::kNone).value == 1.0;
    identical_ok += bleu4(same, same, Smoothing::kAddOne).value == 1.0;
    identical_ok += rouge2(same, same).value == 1.0;
    identical_ok += rougeL(same, same).value == 1.0;
  }
  std::ostringstream d;
  d << "500 pairs, largest oracle difference " << fmt("%.1e", worst) << ", identical pairs exact "
    << identical_ok << "/" << identical;
  return {worst <= 1e-12 && identical_ok == identical, d.str()};
}

// 10 --------------------------------------------------------------------------

Outcome parser_goldens() {
  const char* lambda =
      "( lambda $0 e ( and ( flight $0 ) ( or ( class_type $0 first:cl ) ( class_type $0 coach:cl ) ) "
      "( from $0 ap0 ) ( to $0 ci0 ) ) )";
  const bool sql = parse_sql(kGoldenSql) == test::golden_tree("golden_sql.json");
  const bool lam = parse_lambda(lambda) == test::golden_tree("golden_lambda.json");
  const Grammar w = grammar_registry("wikisql"), a = grammar_registry("atis");
  using S = std::set<std::string>;
  const bool wreg = w.types == S{"stmt", "agg_op", "column_name", "cond_expr", "cmp_op", "string"} &&
                    w.available_types == S{"column_name", "string"};
  const bool areg = a.types == S{"expr", "var", "var_type", "ent", "num", "pred", "cmp_op"} &&
                    a.available_types == S{"var", "ent", "num", "var_type", "pred"};
  std::ostringstream d;
  d << "sql golden " << (sql ? "ok" : "differs") << ", lambda golden " << (lam ? "ok" : "differs")
    << ", wikisql " << w.types.size() << "/" << w.available_types.size() << ", atis " << a.types.size()
    << "/" << a.available_types.size();
  return {sql && lam && wreg && areg, d.str()};
}

// 11 --------------------------------------------------------------------------

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "tag_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "run.cfg") << "hidden=12\nsteps=12\ntt=6\nbatch_size=8\neval_every=4\n"
                                     "src_min_freq=1\ntgt_min_freq=1\nmax_len=20\nseed=5\n";
  const std::string tag = TAG_CLI_PATH;
  auto sh = [](const std::string& cmd) { return std::system(cmd.c_str()); };
  std::vector<std::string> compared;
  bool ok = true;
  for (const char* run : {"a", "b"}) {
    const fs::path d = root / run;
    fs::create_directories(d);
    const std::string q = "'" + d.string() + "'";
    int rc = sh(tag + " synth --grammar wikisql --n 40 --seed 9 --out " + q + "/corpus.jsonl 2> " + q + "/synth.log");
    rc |= sh(tag + " train --config '" + (root / "run.cfg").string() + "' --train " + q +
             "/corpus.jsonl --out " + q + "/model > " + q + "/train.out 2> " + q + "/train.log");
    rc |= sh(tag + " generate --model " + q + "/model --input " + q + "/corpus.jsonl > " + q + "/gen.out");
    ok = ok && rc == 0;
  }
  for (const char* f : {"corpus.jsonl", "model/best.ckpt", "model/last.ckpt", "model/metrics.csv",
                        "model/config.txt", "train.out", "train.log", "gen.out"}) {
    const bool same = fs::exists(root / "a" / f) &&
                      test::read_text((root / "a" / f).string()) == test::read_text((root / "b" / f).string());
    ok = ok && same;
    compared.push_back(std::string(f) + (same ? "" : " (differs)"));
  }
  fs::remove_all(root);
  std::ostringstream d;
  d << "two CLI runs, identical:";
  for (const auto& c : compared) d << ' ' << c;
  return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient suite", gradient_suite},
      {"distribution invariants", distribution_invariants},
      {"type sensitivity", type_sensitivity},
      {"policy-gradient correctness", policy_gradient},
      {"reward-shaping telescoping", telescoping},
      {"overfit run", overfit},
      {"copy necessity", copy_necessity},
      {"HRL effect", hrl_effect},
      {"metrics oracles", metric_oracles},
      {"parser goldens", parser_goldens},
      {"determinism", determinism},
  };
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::strtoul(argv[i], nullptr, 10));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected.empty() && !selected.count(i + 1)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
              << ": " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
