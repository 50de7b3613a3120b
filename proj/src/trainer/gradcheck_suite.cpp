#include "tag/trainer/gradcheck_suite.hpp"

#include <functional>

#include "tag/corpus/example.hpp"
#include "tag/corpus/tokenizer.hpp"
#include "tag/model/model.hpp"
#include "tag/numcore/param_store.hpp"
#include "tag/trainer/losses.hpp"
#include "tag/treelang/parsers.hpp"

namespace tag {

namespace {

Tensor random_tensor(const Shape& shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(shape);
  std::uniform_real_distribution<double> u(lo, hi);
  for (double& v : t.values()) v = u(rng);
  return t;
}

// sum(out * R) with a fixed random R so every output coordinate matters.
Expr probe(Graph& g, Expr out, std::uint64_t salt) {
  Rng rng(salt);
  return sum(mul(out, g.constant(random_tensor(out.shape(), rng))));
}

using Builder = std::function<Expr(Graph&, ParamStore&)>;

GradCheckEntry check_primitive(const std::string& name, ParamStore store, const Builder& build,
                               std::uint64_t salt) {
  LossFn fn = [&](Graph& g) { return probe(g, build(g, store), salt); };
  GradCheckOptions opt;
  opt.coords_per_param = 0;
  return {"numcore." + name, finite_difference_check(fn, store, opt)};
}

std::vector<GradCheckEntry> primitive_checks(Rng& rng) {
  std::vector<GradCheckEntry> out;
  ParamStore s;
  s.add("A", random_tensor({3, 4}, rng));
  s.add("B", random_tensor({4, 2}, rng));
  s.add("x", random_tensor({4}, rng));
  s.add("y", random_tensor({4}, rng));
  s.add("z", random_tensor({3}, rng));
  s.add("pos", random_tensor({4}, rng, 0.5, 2.0));
  auto P = [](Graph& g, ParamStore& st, const char* n) { return g.param(st.get(n)); };
  std::uint64_t salt = 100;
  auto add_check = [&](const std::string& name, const Builder& b) {
    out.push_back(check_primitive(name, s, b, ++salt));
  };

  add_check("matmul_mv", [&](Graph& g, ParamStore& st) { return matmul(P(g, st, "A"), P(g, st, "x")); });
  add_check("matmul_mm", [&](Graph& g, ParamStore& st) { return matmul(P(g, st, "A"), P(g, st, "B")); });
  add_check("transpose", [&](Graph& g, ParamStore& st) { return transpose(P(g, st, "A")); });
  add_check("add", [&](Graph& g, ParamStore& st) { return add(P(g, st, "x"), P(g, st, "y")); });
  add_check("sub", [&](Graph& g, ParamStore& st) { return sub(P(g, st, "x"), P(g, st, "y")); });
  add_check("mul", [&](Graph& g, ParamStore& st) { return mul(P(g, st, "x"), P(g, st, "y")); });
  add_check("mul_self", [&](Graph& g, ParamStore& st) { return mul(P(g, st, "x"), P(g, st, "x")); });
  add_check("scale", [&](Graph& g, ParamStore& st) { return scale(P(g, st, "x"), -1.7); });
  add_check("concat", [&](Graph& g, ParamStore& st) {
    const Expr parts[] = {P(g, st, "x"), P(g, st, "z"), P(g, st, "x")};
    return concat(parts);
  });
  add_check("stack", [&](Graph& g, ParamStore& st) {
    const Expr rows[] = {P(g, st, "x"), P(g, st, "y"), P(g, st, "x")};
    return stack(rows);
  });
  add_check("sigmoid", [&](Graph& g, ParamStore& st) { return sigmoid(P(g, st, "x")); });
  add_check("tanh", [&](Graph& g, ParamStore& st) { return tanh(P(g, st, "x")); });
  add_check("exp", [&](Graph& g, ParamStore& st) { return exp(P(g, st, "x")); });
  add_check("log", [&](Graph& g, ParamStore& st) { return log(P(g, st, "pos")); });
  add_check("softmax", [&](Graph& g, ParamStore& st) { return softmax(P(g, st, "x")); });
  add_check("weighted_softmax", [&](Graph& g, ParamStore& st) {
    return weighted_softmax(P(g, st, "x"), {0.5, 0.0, 1.0, 0.25});
  });
  add_check("lookup", [&](Graph& g, ParamStore& st) { return lookup(P(g, st, "A"), 1); });
  add_check("sum", [&](Graph& g, ParamStore& st) {
    return mul(sum(P(g, st, "x")), sum(P(g, st, "y")));
  });
  add_check("pick", [&](Graph& g, ParamStore& st) {
    return mul(pick(P(g, st, "x"), 2), pick(P(g, st, "y"), 0));
  });
  add_check("affine", [&](Graph& g, ParamStore& st) {
    const std::pair<Expr, Expr> terms[] = {{P(g, st, "A"), P(g, st, "x")},
                                           {P(g, st, "A"), P(g, st, "y")}};
    return affine(P(g, st, "z"), terms);
  });
  add_check("add_all", [&](Graph& g, ParamStore& st) {
    const Expr t[] = {P(g, st, "x"), P(g, st, "y"), P(g, st, "x")};
    return add_all(t);
  });
  add_check("composition", [&](Graph& g, ParamStore& st) {
    const Expr h = tanh(matmul(P(g, st, "A"), P(g, st, "x")));
    return softmax(add(h, sigmoid(P(g, st, "z"))));
  });
  return out;
}

// Decoder and loss checks reach encoder coordinates whose gradient is ~1e-9
// while the loss is ~30; a two-point difference at 1e-5 cannot resolve those
// below roundoff, so they use the five-point stencil at a wider step.
GradCheckOptions model_options() {
  GradCheckOptions o;
  o.epsilon = 3e-3;
  o.five_point = true;
  return o;
}

Vocab vocab_of(const std::vector<std::string>& tokens) { return Vocab::build({tokens}, 1); }

Model make_model(const std::string& grammar, const std::vector<std::string>& src,
                 const std::vector<std::string>& tgt, std::uint64_t seed) {
  ModelConfig cfg;
  cfg.hidden = 4;
  Model m(grammar_registry(grammar), vocab_of(src), vocab_of(tgt), cfg);
  m.init(seed);
  return m;
}

std::vector<std::string> node_tokens(const TokenTypeTree& t) {
  std::vector<std::string> out;
  for (const auto& n : t.nodes()) out.insert(out.end(), n.tokens.begin(), n.tokens.end());
  return out;
}

GradCheckEntry encoder_check(const std::string& name, const TokenTypeTree& tree,
                             const std::string& grammar, std::uint64_t seed) {
  Model m = make_model(grammar, node_tokens(tree), {"x"}, seed);
  LossFn fn = [&](Graph& g) {
    EncoderOutput enc = encode_tree(g, m.params(), tree, m.grammar(), m.source(),
                                    m.encoder_config());
    return sum(enc.root());
  };
  GradCheckOptions opt;
  opt.prefixes = {"enc."};
  return {"encoder." + name, finite_difference_check(fn, m.params(), opt)};
}

}  // namespace

std::vector<GradCheckEntry> run_gradcheck_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradCheckEntry> out = primitive_checks(rng);

  const TokenTypeTree golden = parse_sql(kGoldenSql);
  TokenTypeTree leaf("wikisql");
  leaf.add_node("column_name", {"Capacity"});
  const TokenTypeTree lambda =
      parse_lambda("( lambda $0 e ( and ( flight $0 ) ( from $0 boston ) ( to $0 denver ) ) )");

  out.push_back(encoder_check("leaf", leaf, "wikisql", seed + 1));
  out.push_back(encoder_check("sql_golden", golden, "wikisql", seed + 2));
  out.push_back(encoder_check("lambda", lambda, "atis", seed + 3));

  // Decoder: three steps, the first two copying so later steps see decay.
  {
    Model m = make_model("wikisql", node_tokens(golden), tokenize_comment(kGoldenSqlComment),
                         seed + 4);
    LossFn fn = [&](Graph& g) {
      const TreeContext ctx = prepare_tree(g, m, golden);
      DecoderState st = initial_state(g, m, ctx);
      std::vector<Expr> terms;
      const std::size_t copied[] = {2, 6, 4};
      for (std::size_t step = 0; step < 3; ++step) {
        const StepOutput s = decoder_step(g, m, ctx, st);
        std::uint64_t salt = 1000 + 10 * step;
        terms.push_back(probe(g, s.att.alpha, salt++));
        terms.push_back(probe(g, s.att.q, salt++));
        terms.push_back(probe(g, s.op, salt++));
        terms.push_back(probe(g, s.gen, salt++));
        if (s.copy) terms.push_back(probe(g, *s.copy, salt++));
        advance(st, m, copied[step], m.target().id(ctx.surfaces[copied[step]].back()));
      }
      return add_all(terms);
    };
    out.push_back({"decoder.steps", finite_difference_check(fn, m.params(), model_options())});
  }

  // mle_loss: "otkrytie"/"arena" are out of the target vocabulary, so that
  // span is reachable only through the copy branch; other tokens mix both.
  {
    std::vector<std::string> tgt = tokenize_comment(kGoldenSqlComment);
    std::erase_if(tgt, [](const std::string& t) { return t == "otkrytie" || t == "arena"; });
    Model m = make_model("wikisql", node_tokens(golden), tgt, seed + 5);
    Example ex{golden, tokenize_comment(kGoldenSqlComment)};
    LossFn fn = [&](Graph& g) { return mle_loss(g, m, ex).loss; };
    out.push_back({"trainer.mle_loss", finite_difference_check(fn, m.params(), model_options())});

    Model nm = make_model("wikisql", node_tokens(golden), tokenize_comment(kGoldenSqlComment),
                          seed + 6);
    nm.config().decoder.use_mask = false;
    LossFn fn2 = [&](Graph& g) { return mle_loss(g, nm, ex).loss; };
    out.push_back({"trainer.mle_loss_unmasked", finite_difference_check(fn2, nm.params(), model_options())});
  }
  return out;
}

}  // namespace tag
