#include <doctest.h>

#include <set>
#include <sstream>

#include <json.hpp>

#include "model_fixtures.hpp"
#include "oracles.hpp"
#include "tag/corpus/tokenizer.hpp"
#include "tag/error.hpp"
#include "tag/model/decoder.hpp"
#include "tag/numcore/gradcheck.hpp"
#include "tag/treelang/parsers.hpp"

using namespace tag;

namespace {

void fill(Tensor& t, double v) { std::fill(t.values().begin(), t.values().end(), v); }

oracle::Mat as_mat(const Tensor& t) {
  oracle::Mat m(t.dim(0), oracle::Vec(t.dim(1)));
  for (std::size_t r = 0; r < t.dim(0); ++r) {
    for (std::size_t c = 0; c < t.dim(1); ++c) m[r][c] = t.at(r, c);
  }
  return m;
}

}  // namespace

TEST_CASE("step recurrence") {
  std::mt19937_64 rng(1);
  Model model = test::make_model(5, 1);
  ParamStore& ps = model.params();
  test::randomize(ps, rng, 0.8);

  Graph g;
  const Tensor z0 = Tensor::vector({0.1, -0.2, 0.3, 0.05, -0.4});
  const Tensor c0 = Tensor::vector({-0.3, 0.2, 0.0, 0.7, 0.1});
  const auto [z, c] = step_recurrence(g, ps, g.constant(z0), g.constant(c0), 6);
  const auto [z2, c2] = step_recurrence(g, ps, g.constant(z0), g.constant(c0), 6);
  CHECK(z.value() == z2.value());

  // textbook LSTM cell from the raw tensors
  const oracle::Vec x = as_mat(ps.get("dec.emb"))[6];
  auto gate = [&](const char* n, double (*f)(double)) {
    const std::string b = std::string("dec.lstm.") + n;
    return oracle::apply(oracle::plus(oracle::plus(oracle::matvec(as_mat(ps.get(b + ".W")), x),
                                                   oracle::matvec(as_mat(ps.get(b + ".U")), z0.values())),
                                      ps.get(b + ".b").values()),
                         f);
  };
  const auto i = gate("i", oracle::sigm), f = gate("f", oracle::sigm);
  const auto o = gate("o", oracle::sigm), u = gate("u", oracle::tanh_);
  const auto cell = oracle::plus(oracle::hadamard(f, c0.values()), oracle::hadamard(i, u));
  const auto h = oracle::hadamard(o, oracle::apply(cell, oracle::tanh_));
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(std::abs(z.value()[r] - h[r]) < 1e-12);
    CHECK(std::abs(c.value()[r] - cell[r]) < 1e-12);
  }

  for (auto& [name, t] : ps.entries()) {
    if (name.rfind("dec.lstm.", 0) == 0) fill(t, 0.0);
  }
  Graph g2;
  Expr zz = g2.constant(z0), cc = g2.constant(Tensor({5}));
  for (int m = 0; m < 3; ++m) {
    std::tie(zz, cc) = step_recurrence(g2, ps, zz, cc, 4 + m);
    CHECK(zz.value().values() == std::vector<double>(5, 0.0));
  }
}

TEST_CASE("attention") {
  std::mt19937_64 rng(2);
  Model model = test::make_model(4, 2);
  ParamStore& ps = model.params();
  Graph g;
  const Expr z = g.constant(Tensor::vector({0.3, -0.1, 0.2, 0.9}));
  const Expr one[] = {g.constant(Tensor::vector({0.5, 0.1, -0.2, 0.4}))};
  CHECK(attend(g, ps, stack(one), z).alpha.value().values() == std::vector<double>{1.0});

  const Expr same = g.constant(Tensor::vector({0.2, 0.2, -0.7, 0.1}));
  const Expr three[] = {same, same, same};
  for (double a : attend(g, ps, stack(three), z).alpha.value().values()) CHECK(a == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  fill(ps.get("dec.att.Wq"), 0.0);
  CHECK(attend(g, ps, stack(three), z).q.value().values() == std::vector<double>(4, 0.0));
}

TEST_CASE("operation and generation distributions") {
  Model model = test::make_model(3, 3);
  ParamStore& ps = model.params();
  Graph g;
  const Expr q = g.constant(Tensor::vector({1.0, 0.0, 0.0}));
  fill(ps.get("dec.op.Ws"), 0.0);
  CHECK(operation_distribution(g, ps, q).value().values() == std::vector<double>{0.5, 0.5});
  ps.get("dec.op.Ws").at(0, 0) = 10.0;
  CHECK(operation_distribution(g, ps, q).value()[kOpCopy] > 0.9999);

  Tensor& wg = ps.get("dec.gen.Wg");
  fill(wg, 0.0);
  const auto uniform = generation_distribution(g, ps, q).value().values();
  for (double p : uniform) CHECK(p == doctest::Approx(1.0 / static_cast<double>(wg.dim(0))).epsilon(1e-15));
  wg.at(5, 0) = 30.0;
  CHECK(generation_distribution(g, ps, q).value()[5] > 0.9999);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    test::randomize(ps, rng, 3.0);
    const Expr qr = g.constant(Tensor::vector({test::uniform(rng, -1, 1), test::uniform(rng, -1, 1), test::uniform(rng, -1, 1)}));
    CHECK(std::abs(test::total(operation_distribution(g, ps, qr).value().values()) - 1.0) < 1e-9);
    CHECK(std::abs(test::total(generation_distribution(g, ps, qr).value().values()) - 1.0) < 1e-9);
  }
}

TEST_CASE("grammar-type mask") {
  const Grammar w = grammar_registry("wikisql");
  const TokenTypeTree golden = test::golden_tree("golden_sql.json");
  const auto d = build_mask(golden, w);
  for (std::size_t i = 0; i < golden.size(); ++i) {
    const std::string& type = golden.node(i).type;
    CAPTURE(type);
    if (type == "column_name" || type == "string") {
      CHECK(d[i] == 0.0);
    } else {
      CHECK(std::isinf(d[i]));
      CHECK(d[i] < 0.0);
    }
  }
  Grammar open = w;
  open.available_types = open.types;
  CHECK(build_mask(golden, open) == std::vector<double>(7, 0.0));
  CHECK(build_mask(golden, w, false) == std::vector<double>(7, 0.0));
}

TEST_CASE("copy distribution") {
  const double inf = std::numeric_limits<double>::infinity();
  Graph g;
  std::vector<Expr> rows;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 4; ++i) {
    rows.push_back(g.constant(Tensor::vector({test::uniform(rng, -1, 1), test::uniform(rng, -1, 1)})));
  }
  const Expr H = stack(rows);
  const Expr q = g.constant(Tensor::vector({0.7, -0.4}));

  const auto only3 = copy_distribution(H, q, copy_weights({-inf, -inf, -inf, 0.0}, {0, 0, 0, 0}));
  REQUIRE(only3);
  CHECK(only3->value().values() == std::vector<double>{0.0, 0.0, 0.0, 1.0});

  const auto decayed = copy_distribution(H, q, copy_weights({0, 0, 0, 0}, {0.3, 1.0, 0.0, 0.9}));
  REQUIRE(decayed);
  CHECK(decayed->value()[1] == 0.0);
  CHECK(std::abs(test::total(decayed->value().values()) - 1.0) < 1e-12);

  const Expr flat_rows[] = {g.constant(Tensor::vector({0.0, 0.0})), g.constant(Tensor::vector({0.0, 0.0})),
                            g.constant(Tensor::vector({0.0, 0.0}))};
  const auto renorm = copy_distribution(stack(flat_rows), q, copy_weights({0, 0, 0}, {0.5, 0, 0}));
  REQUIRE(renorm);
  CHECK(renorm->value()[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(renorm->value()[1] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(renorm->value()[2] == doctest::Approx(0.4).epsilon(1e-15));

  CHECK_FALSE(copy_distribution(H, q, copy_weights({-inf, 0, -inf, 0}, {0, 1, 0, 1})));

  // mask and decay off: plain softmax of the scores
  const auto plain = copy_distribution(H, q, copy_weights({0, 0, 0, 0}, {0, 0, 0, 0}));
  const auto ref = softmax(matmul(H, q)).value().values();
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(plain->value()[i] - ref[i]) < 1e-15);
}

TEST_CASE("copy decay") {
  std::vector<double> l = {0.0};
  l = decay_update(l, 0, 0.5);
  CHECK(l[0] == 1.0);
  l = decay_update(l, std::nullopt, 0.5);
  CHECK(l[0] == 0.5);
  l = decay_update(l, std::nullopt, 0.5);
  CHECK(l[0] == 0.25);

  std::vector<double> two = {0.0, 0.0, 0.0};
  two = decay_update(two, 0, 0.5);  // step 1 copies node 0
  two = decay_update(two, 1, 0.5);  // step 2 copies node 1
  two = decay_update(two, std::nullopt, 0.5);
  CHECK(two == std::vector<double>{0.25, 0.5, 0.0});

  std::vector<double> mono = {1.0};
  for (int m = 0; m < 10; ++m) {
    const auto next = decay_update(mono, std::nullopt, 0.7);
    CHECK(next[0] < mono[0]);
    CHECK(next[0] == 0.7 * mono[0]);
    mono = next;
  }
  CHECK_THROWS_AS(decay_update(l, std::nullopt, 1.0), ConfigError);
  CHECK_THROWS_AS(decay_update(l, std::nullopt, 0.0), ConfigError);
}

TEST_CASE("decoding with the type mask and decay") {
  std::mt19937_64 rng(5);
  const TokenTypeTree golden = test::golden_tree("golden_sql.json");
  Model model = test::make_model(6, 5);
  const Grammar& grammar = model.grammar();
  std::set<std::string> allowed(model.target().tokens().begin(), model.target().tokens().end());
  for (const auto& n : golden.nodes()) {
    if (grammar.is_available(n.type)) {
      for (const auto& t : copy_surface(n)) allowed.insert(t);
    }
  }
  for (int trial = 0; trial < 20; ++trial) {
    test::randomize(model.params(), rng, 1.5);
    const Trajectory a = decode_greedy(model, golden, 12);
    const Trajectory b = decode_greedy(model, golden, 12);
    CHECK(a.tokens == b.tokens);
    for (const auto& t : a.tokens) CHECK(allowed.count(t) == 1);
    for (const auto& act : a.actions) {
      if (act.op == kOpCopy) CHECK(grammar.is_available(golden.node(act.choice).type));
    }
  }
}

TEST_CASE("dominant EOS logits end decoding at the first step") {
  Model model = test::make_model(6, 6);
  ParamStore& ps = model.params();
  // z = o * tanh(i * u) with saturated gates is positive everywhere, and so
  // is q = tanh(5 z)
  for (auto& [name, t] : ps.entries()) {
    if (name.rfind("dec.lstm.", 0) == 0) fill(t, 0.0);
  }
  fill(ps.get("dec.lstm.i.b"), 20.0);
  fill(ps.get("dec.lstm.u.b"), 20.0);
  fill(ps.get("dec.lstm.o.b"), 20.0);
  fill(ps.get("dec.lstm.f.b"), -20.0);
  Tensor& wq = ps.get("dec.att.Wq");
  fill(wq, 0.0);
  for (std::size_t j = 0; j < 6; ++j) wq.at(j, 6 + j) = 5.0;
  Tensor& ws = ps.get("dec.op.Ws");
  fill(ws, 0.0);
  for (std::size_t j = 0; j < 6; ++j) {
    ws.at(kOpGenerate, j) = 10.0;
    ws.at(kOpCopy, j) = -10.0;
  }
  Tensor& wg = ps.get("dec.gen.Wg");
  fill(wg, 0.0);
  for (std::size_t j = 0; j < 6; ++j) wg.at(Vocab::kEos, j) = 10.0;

  const Trajectory t = decode_greedy(model, test::golden_tree("golden_sql.json"), 10);
  CHECK(t.tokens.empty());
  CHECK(t.reached_eos);
  REQUIRE(t.actions.size() == 1);
  CHECK(t.actions[0].op == kOpGenerate);
  CHECK(t.actions[0].choice == Vocab::kEos);
}

TEST_CASE("sampling") {
  std::mt19937_64 seeds(7);
  const TokenTypeTree golden = test::golden_tree("golden_sql.json");
  Model model = test::make_model(5, 7);
  for (int trial = 0; trial < 20; ++trial) {
    test::randomize(model.params(), seeds, 1.0);
    Rng a(trial), b(trial);
    const Trajectory ta = decode_sample(model, golden, 10, a);
    const Trajectory tb = decode_sample(model, golden, 10, b);
    CHECK(ta.tokens == tb.tokens);
    CHECK(ta.step_logp == tb.step_logp);
    const auto again = rescore(model, golden, ta.actions);
    REQUIRE(again.size() == ta.step_logp.size());
    for (std::size_t m = 0; m < again.size(); ++m) CHECK(std::abs(again[m] - ta.step_logp[m]) <= 1e-12);
  }

  Rng rng(99);
  std::size_t first = 0;
  const std::size_t n = 100000;
  for (std::size_t i = 0; i < n; ++i) first += gumbel_max({0.7, 0.3}, rng) == 0;
  CHECK(std::abs(static_cast<double>(first) / n - 0.7) < 0.01);
}

TEST_CASE("sampled log-probabilities factorise the trajectory probability") {
  // Joint probability recomputed step by step from the two distributions.
  std::mt19937_64 seeds(8);
  const TokenTypeTree golden = test::golden_tree("golden_sql.json");
  Model model = test::make_model(4, 8);
  test::randomize(model.params(), seeds, 1.0);
  Rng rng(3);
  Graph g;
  const SampledPath path = sample_on_graph(g, model, golden, 8, rng);
  double joint = 0.0;
  {
    Graph g2;
    const TreeContext ctx = prepare_tree(g2, model, golden);
    DecoderState state = initial_state(g2, model, ctx);
    for (const Action& a : path.trajectory.actions) {
      const StepOutput s = decoder_step(g2, model, ctx, state);
      const double p_op = effective_op_prob(s, a.op);
      const double p_word = a.op == kOpCopy ? s.copy->value()[a.choice] : s.gen.value()[a.choice];
      joint += std::log(p_op * p_word);
      std::optional<std::size_t> copied, fed;
      if (a.op == kOpCopy) {
        copied = a.choice;
        if (!a.emitted.empty()) fed = model.target().id(a.emitted.back());
      } else if (a.choice != Vocab::kEos) {
        fed = a.choice;
      }
      advance(state, model, copied, fed);
    }
  }
  double sum = 0.0;
  for (double v : path.trajectory.step_logp) sum += v;
  CHECK(std::abs(sum - joint) < 1e-9);
  for (std::size_t m = 0; m < path.step_logp.size(); ++m) {
    CHECK(path.step_logp[m].scalar() == path.trajectory.step_logp[m]);
  }
}

TEST_CASE("distribution invariants on random instances") {
  std::mt19937_64 rng(9);
  const Grammar grammar = grammar_registry("wikisql");
  for (int trial = 0; trial < 100; ++trial) {
    DecoderConfig dc;
    dc.use_mask = trial % 4 != 3;
    dc.gamma = test::uniform(rng, 0.05, 0.95);
    Model model = test::make_model(4, trial, dc);
    test::randomize(model.params(), rng, 2.0);
    const TokenTypeTree tree = test::random_tree(rng, grammar, 9, test::source_pool());
    Graph g;
    const TreeContext ctx = prepare_tree(g, model, tree);
    DecoderState state = initial_state(g, model, ctx);
    for (int m = 0; m < 6; ++m) {
      const StepOutput s = decoder_step(g, model, ctx, state);
      CHECK(std::abs(test::total(s.att.alpha.value().values()) - 1.0) < 1e-9);
      CHECK(std::abs(test::total(s.op.value().values()) - 1.0) < 1e-9);
      CHECK(std::abs(test::total(s.gen.value().values()) - 1.0) < 1e-9);
      std::optional<std::size_t> copied;
      if (s.copy) {
        const auto& p = s.copy->value().values();
        CHECK(std::abs(test::total(p) - 1.0) < 1e-9);
        for (std::size_t i = 0; i < p.size(); ++i) {
          if (dc.use_mask && !grammar.is_available(tree.node(i).type)) CHECK(p[i] == 0.0);
          if (s.lambda[i] == 1.0) CHECK(p[i] == 0.0);
        }
        copied = rng() % tree.size();
        if (p[*copied] == 0.0) copied.reset();
      }
      advance(state, model, copied, 4 + rng() % 6);
    }
  }
}

TEST_CASE("decoder gradients through the renormalised copy distribution") {
  std::mt19937_64 rng(10);
  Model model = test::make_model(3, 10);
  test::randomize(model.params(), rng, 1.0);
  const TokenTypeTree golden = test::golden_tree("golden_sql.json");
  LossFn loss = [&](Graph& g) {
    const TreeContext ctx = prepare_tree(g, model, golden);
    DecoderState state = initial_state(g, model, ctx);
    std::vector<Expr> terms;
    const std::size_t copies[] = {6, 2, 4};
    for (std::size_t m = 0; m < 3; ++m) {
      const StepOutput s = decoder_step(g, model, ctx, state);
      terms.push_back(log(pick(*s.copy, copies[m])));
      terms.push_back(log(pick(s.op, kOpCopy)));
      terms.push_back(log(pick(s.gen, 5 + m)));
      advance(state, model, copies[m], 5 + m);
    }
    return add_all(terms);
  };
  GradCheckOptions opt;
  opt.prefixes = {"dec."};
  CHECK(finite_difference_check(loss, model.params(), opt).max_relative_error < 1e-4);
}
