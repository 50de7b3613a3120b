#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "model_fixtures.hpp"
#include "train_fixtures.hpp"
#include "tag/error.hpp"
#include "tag/numcore/checkpoint.hpp"
#include "tag/trainer/losses.hpp"
#include "tag/trainer/train.hpp"

using namespace tag;

namespace {

using Toks = std::vector<std::string>;

TokenTypeTree leaf(const std::string& type, const Toks& tokens) {
  TokenTypeTree t("wikisql");
  t.add_node(type, tokens);
  return t;
}

// Step outputs of the decoder fed a fixed action sequence, on a private graph.
struct Replay {
  Graph g;
  TreeContext ctx;
  DecoderState state;
  Replay(Model& m, const TokenTypeTree& t) : ctx(prepare_tree(g, m, t)), state(initial_state(g, m, ctx)) {}
};

}  // namespace

TEST_CASE("MLE marginalises over the two branches") {
  std::mt19937_64 rng(1);
  Model model = test::make_model(5, 1);
  test::randomize(model.params(), rng, 1.0);
  const Example ex{leaf("column_name", {"Stadium"}), {"stadium"}};

  Replay r(model, ex.tree);
  const StepOutput s0 = decoder_step(r.g, model, r.ctx, r.state);
  REQUIRE(s0.copy);
  const std::size_t id = model.target().id("stadium");
  const double p0 = s0.op.value()[kOpGenerate] * s0.gen.value()[id] +
                    s0.op.value()[kOpCopy] * s0.copy->value()[0];
  advance(r.state, model, 0, id);
  const StepOutput s1 = decoder_step(r.g, model, r.ctx, r.state);
  const double p1 = (s1.copy ? s1.op.value()[kOpGenerate] : 1.0) * s1.gen.value()[Vocab::kEos];

  Graph g;
  const MleResult m = mle_loss(g, model, ex);
  CHECK(m.impossible_steps.empty());
  CHECK(std::abs(m.value - -(std::log(p0) + std::log(p1))) < 1e-12);
}

TEST_CASE("MLE on out-of-vocabulary targets") {
  std::mt19937_64 rng(2);
  Model model = test::make_model(5, 2);
  test::randomize(model.params(), rng, 1.0);
  const Example ex{leaf("string", {"Otkrytie"}), {"otkrytie"}};
  REQUIRE_FALSE(model.target().contains("otkrytie"));

  Replay r(model, ex.tree);
  const StepOutput s0 = decoder_step(r.g, model, r.ctx, r.state);
  const double p0 = s0.op.value()[kOpCopy] * s0.copy->value()[0];
  advance(r.state, model, 0, Vocab::kUnk);
  const StepOutput s1 = decoder_step(r.g, model, r.ctx, r.state);
  const double p1 = s1.op.value()[kOpGenerate] * s1.gen.value()[Vocab::kEos];
  Graph g;
  const MleResult m = mle_loss(g, model, ex);
  CHECK(std::isfinite(m.value));
  CHECK(std::abs(m.value - -(std::log(p0) + std::log(p1))) < 1e-12);

  // column operators are not copyable: neither branch can produce the token
  const Example stuck{leaf("cmp_op", {"zz"}), {"zz"}};
  Graph g2;
  const MleResult bad = mle_loss(g2, model, stuck);
  CHECK(bad.impossible_steps == std::vector<std::size_t>{0});
  CHECK(bad.value >= kZeroProbPenalty);
  CHECK(bad.value < 2 * kZeroProbPenalty);

  // the generate-only baseline scores the same target as <unk>
  DecoderConfig dc;
  dc.allow_copy = false;
  Model plain = test::make_model(5, 2, dc);
  test::randomize(plain.params(), rng, 1.0);
  Replay rp(plain, ex.tree);
  const StepOutput q0 = decoder_step(rp.g, plain, rp.ctx, rp.state);
  CHECK_FALSE(q0.copy);
  advance(rp.state, plain, std::nullopt, Vocab::kUnk);
  const StepOutput q1 = decoder_step(rp.g, plain, rp.ctx, rp.state);
  Graph g3;
  const MleResult u = mle_loss(g3, plain, ex);
  CHECK(std::abs(u.value - -(std::log(q0.gen.value()[Vocab::kUnk]) + std::log(q1.gen.value()[Vocab::kEos]))) <
        1e-12);
}

TEST_CASE("shaped rewards are differences of prefix rewards") {
  const Toks ref = {"a", "b"};
  const auto r = shaped_rewards({{"a"}, {"c"}}, ref, RewardMetric::kBleu4);
  REQUIRE(r.size() == 2);
  const double ra = sentence_reward({"a"}, ref, RewardMetric::kBleu4);
  const double rac = sentence_reward({"a", "c"}, ref, RewardMetric::kBleu4);
  CHECK(r[0] == ra);
  CHECK(r[1] == rac - ra);
  CHECK(r[0] + r[1] == rac);

  const auto same = shaped_rewards({{"a"}, {"b"}}, ref, RewardMetric::kRougeL);
  CHECK(same[0] + same[1] == 1.0);
  const auto multi = shaped_rewards({{"a", "b"}, {}}, ref, RewardMetric::kBleu4);
  CHECK(multi[0] == 1.0);
  CHECK(multi[1] == 0.0);
}

TEST_CASE("policy gradient surrogate") {
  std::mt19937_64 rng(3);
  Model model = test::make_model(5, 3);
  test::randomize(model.params(), rng, 1.0);
  const TokenTypeTree golden = test::golden_tree("golden_sql.json");

  // a reference nothing can produce: every reward and advantage is zero
  Example unreachable{golden, {"qqq", "rrr"}};
  model.params().zero_grad();
  Rng r0(1);
  Graph g0;
  const HrlResult h0 = hrl_loss(g0, model, unreachable, r0, 0.0, RewardMetric::kBleu4, 10);
  CHECK(h0.reward == 0.0);
  g0.backward(h0.loss);
  for (const auto& [name, t] : model.params().entries()) {
    for (double v : t.grad()) CHECK(v == 0.0);
  }

  // with a baseline under every reward-to-go, a descent step on the surrogate
  // makes the sampled trajectory more likely
  Example ex{golden, {"what", "is", "the", "maximum", "capacity"}};
  for (int trial = 0; trial < 5; ++trial) {
    model.params().zero_grad();
    Rng r1(10 + trial);
    Graph g;
    const HrlResult h = hrl_loss(g, model, ex, r1, -2.0, RewardMetric::kBleu4, 10);
    g.backward(h.loss);
    double before = 0.0, after = 0.0;
    for (double v : rescore(model, golden, h.trajectory.actions)) before += v;
    for (auto& [name, t] : model.params().entries()) {
      for (std::size_t i = 0; i < t.size(); ++i) t.values()[i] -= 1e-3 * t.grad()[i];
    }
    for (double v : rescore(model, golden, h.trajectory.actions)) after += v;
    CHECK(after > before);
  }
}

TEST_CASE("mu schedule and the mixed objective") {
  CHECK(mu_schedule(0, 100, false) == 1.0);
  CHECK(mu_schedule(50, 100, false) == 0.5);
  CHECK(mu_schedule(100, 100, false) == 0.0);
  CHECK(mu_schedule(500, 100, false) == 0.0);
  CHECK(mu_schedule(70, 100, true) == 1.0);
  CHECK_THROWS_AS(mu_schedule(0, 0, false), ConfigError);

  std::mt19937_64 rng(4);
  Model model = test::make_model(5, 4);
  test::randomize(model.params(), rng, 1.0);
  const Example ex{test::golden_tree("golden_sql.json"), {"what", "is", "the", "capacity"}};
  Rng r(5);
  Graph g;
  const MixedResult half = mixed_loss(g, model, ex, 0.5, r, 0.1, RewardMetric::kBleu4, 8);
  CHECK(half.used_hrl);
  CHECK(std::abs(half.loss.scalar() - (0.5 * half.mle + 0.5 * half.hrl)) < 1e-12);

  Rng r2(5);
  Graph g2;
  const MixedResult mle = mixed_loss(g2, model, ex, 1.0, r2, 0.1, RewardMetric::kBleu4, 8);
  CHECK_FALSE(mle.used_hrl);
  CHECK(mle.loss.scalar() == mle.mle);
  Graph g3;
  CHECK(mle.mle == mle_loss(g3, model, ex).value);
  CHECK_THROWS_AS(mixed_loss(g3, model, ex, 1.5, r2, 0.0, RewardMetric::kBleu4, 8), ConfigError);
}

TEST_CASE("training configuration") {
  const TrainConfig c = parse_config("lr = 0.01\n# comment\nsteps=5   # trailing\nreward=rougeL\nno_copy=true\n");
  CHECK(c.lr == 0.01);
  CHECK(c.steps == 5);
  CHECK(c.reward == RewardMetric::kRougeL);
  CHECK(c.no_copy);
  CHECK_THROWS_AS(parse_config("learning_rate=0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("steps=many\n"), ConfigError);
  CHECK(config_to_text(parse_config(config_to_text(c))) == config_to_text(c));
  for (const auto& [key, help] : config_key_help()) {
    CAPTURE(key);
    CHECK(config_to_text(c).find(key + "=") != std::string::npos);
  }

  TrainConfig bad;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = {};
  bad.tt = 0;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  MetricsRow row;
  row.step = 3;
  row.mu = 0.5;
  row.loss_mle = 1.0;
  row.loss_hrl = 2.0;
  row.reward_mean = 0.25;
  CHECK(metrics_csv_line(row) == "3,0.5,1,2,0.25,,,");
  row.dev = CorpusReport{0.5, 0.25, 0.125, 4};
  CHECK(metrics_csv_line(row) == "3,0.5,1,2,0.25,0.5,0.25,0.125");
}

TEST_CASE("training runs are reproducible and reduce the loss") {
  const auto train_set = test::synthetic_examples(12, 5);
  TrainConfig cfg;
  cfg.hidden = 8;
  cfg.batch_size = 4;
  cfg.steps = 6;
  cfg.tt = 4;
  cfg.src_min_freq = 1;
  cfg.tgt_min_freq = 1;
  cfg.eval_every = 3;
  cfg.max_len = 15;
  cfg.lr = 0.01;

  const auto dir = std::filesystem::temp_directory_path() / "tag_test_trainer";
  std::filesystem::remove_all(dir);
  auto run = [&](const std::string& sub) {
    Model m = test::model_for(train_set, cfg);
    std::ostringstream csv;
    TrainOutputs out;
    out.checkpoint_dir = (dir / sub).string();
    out.metrics_csv = &csv;
    train(m, train_set, {}, cfg, out);
    return csv.str();
  };
  const std::string a = run("a"), b = run("b");
  CHECK(a == b);
  CHECK(a.rfind(std::string(kMetricsCsvHeader) + "\n", 0) == 0);
  for (const char* f : {"best.ckpt", "last.ckpt"}) {
    CHECK(test::read_text((dir / "a" / f).string()) == test::read_text((dir / "b" / f).string()));
  }
  std::filesystem::remove_all(dir);

  cfg.mle_only = true;
  cfg.steps = 40;
  cfg.eval_every = 40;
  Model m = test::model_for(train_set, cfg);
  const TrainResult r = train(m, train_set, {}, cfg);
  REQUIRE(r.rows.size() == 40);
  CHECK(r.rows.back().loss_mle < 0.8 * r.rows.front().loss_mle);
  CHECK(r.impossible_steps == 0);
  for (const auto& row : r.rows) CHECK(row.mu == 1.0);

  CHECK_THROWS_AS(train(m, {}, {}, cfg), ValidationError);
}
