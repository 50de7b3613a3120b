#include "tag/cli/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tag/cli/manifest.hpp"
#include "tag/corpus/alignment.hpp"
#include "tag/corpus/example.hpp"
#include "tag/corpus/synthetic.hpp"
#include "tag/corpus/tokenizer.hpp"
#include "tag/corpus/vocab.hpp"
#include "tag/error.hpp"
#include "tag/metrics/metrics.hpp"
#include "tag/model/model.hpp"
#include "tag/numcore/checkpoint.hpp"
#include "tag/trainer/config.hpp"
#include "tag/trainer/gradcheck_suite.hpp"
#include "tag/trainer/losses.hpp"
#include "tag/trainer/train.hpp"
#include "tag/treelang/stats.hpp"
#include "tag/treelang/tree_json.hpp"

namespace tag {

namespace fs = std::filesystem;

namespace {

struct Io {
  std::ostream& out;
  std::ostream& err;
};

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<CorpusRecord> read_corpus(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_corpus_jsonl(in);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  return out;
}

LambdaTypeTable lambda_table(const std::string& path) {
  return path.empty() ? LambdaTypeTable::defaults() : LambdaTypeTable::load(path);
}

std::vector<std::vector<std::string>> source_streams(const std::vector<Example>& examples) {
  std::vector<std::vector<std::string>> out;
  for (const auto& e : examples) out.push_back(source_tokens(e.tree));
  return out;
}

std::vector<std::vector<std::string>> target_streams(const std::vector<Example>& examples) {
  std::vector<std::vector<std::string>> out;
  for (const auto& e : examples) out.push_back(e.comment);
  return out;
}

// Reports unreachable target tokens on `err`; returns how many there were.
std::size_t report_lint(const std::vector<Example>& examples, const Vocab& target,
                        const AlignmentOptions& options, std::ostream& err) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Grammar g = grammar_registry(examples[i].tree.grammar());
    for (const auto& issue : lint_example(examples[i].tree, g, examples[i].comment, target, i,
                                          options)) {
      if (total < 20) {
        err << "lint: example " << issue.example + 1 << " position " << issue.position
            << ": '" << issue.token << "' is neither in the target vocabulary nor copyable\n";
      }
      ++total;
    }
  }
  if (total > 20) err << "lint: " << total - 20 << " more issues not shown\n";
  return total;
}

// Lines of a tree file: tree documents, pre-parsed records or code records.
std::vector<TokenTypeTree> read_trees(const std::string& path, const Grammar* grammar) {
  std::istringstream in(read_file(path));
  std::vector<TokenTypeTree> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + " line " + std::to_string(lineno);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(where + ": " + e.what());
    }
    try {
      if (doc.contains("nodes")) {
        const std::string text = doc.dump();
        out.push_back(grammar ? tree_from_json(text, *grammar) : tree_from_json(text));
      } else if (doc.contains("tree")) {
        const std::string text = doc["tree"].dump();
        out.push_back(grammar ? tree_from_json(text, *grammar) : tree_from_json(text));
      } else if (doc.contains("code") && doc.contains("lang")) {
        TokenTypeTree t = parse_code(doc["code"].get<std::string>(), doc["lang"].get<std::string>());
        validate(t, grammar ? *grammar : grammar_registry(t.grammar()));
        out.push_back(std::move(t));
      } else {
        throw ValidationError("expected a tree document or a corpus record");
      }
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const ParseError& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  if (out.empty()) throw ValidationError(path + ": no trees");
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

Tokens tokenize_or_empty(const std::string& line) {
  if (line.find_first_not_of(" \t") == std::string::npos) return {};
  return tokenize_comment(line);
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string grammar;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  double oov_fraction = 0.5;
  std::string out;
};

int cmd_synth(const SynthArgs& a, Io io) {
  SyntheticOptions opt;
  opt.oov_fraction = a.oov_fraction;
  const auto records = generate_synthetic(a.n, a.seed, a.grammar, opt);
  std::ostringstream buf;
  for (const auto& r : records) write_record_jsonl(buf, r);
  if (a.out.empty() || a.out == "-") {
    io.out << buf.str();
  } else {
    open_out(a.out) << buf.str();
    io.err << "wrote " << records.size() << " examples to " << a.out << "\n";
  }
  return kExitOk;
}

// ----------------------------------------------------------- preprocess

struct PreprocessArgs {
  std::string corpus;
  std::string out;
  std::string grammar;
  std::size_t src_min_freq = 4;
  std::size_t tgt_min_freq = 4;
  std::string lambda_types;
  bool strict = false;
};

int cmd_preprocess(const PreprocessArgs& a, const std::vector<std::string>& argv, Io io) {
  if (a.src_min_freq == 0 || a.tgt_min_freq == 0) throw ConfigError("min freq must be >= 1");
  fs::create_directories(a.out);
  RunManifest m;
  m.command = "preprocess";
  m.argv = argv;
  m.version = tool_version();
  m.started = utc_timestamp();
  m.input_digests[a.corpus] = sha256_hex(read_file(a.corpus));
  if (!a.lambda_types.empty()) m.input_digests[a.lambda_types] = sha256_file(a.lambda_types);
  m.config = "src_min_freq=" + std::to_string(a.src_min_freq) +
             "\ntgt_min_freq=" + std::to_string(a.tgt_min_freq) + "\n";
  const std::string manifest_path = (fs::path(a.out) / "manifest.json").string();
  write_manifest(manifest_path, m);

  std::optional<Grammar> grammar;
  if (!a.grammar.empty()) grammar = grammar_registry(a.grammar);
  const auto records = read_corpus(a.corpus);
  const auto examples =
      load_examples(records, grammar ? &*grammar : nullptr, lambda_table(a.lambda_types));
  if (examples.empty()) throw ValidationError(a.corpus + ": no examples");

  const Vocab src = Vocab::build(source_streams(examples), a.src_min_freq);
  const Vocab tgt = Vocab::build(target_streams(examples), a.tgt_min_freq);
  src.save((fs::path(a.out) / "src.vocab").string());
  tgt.save((fs::path(a.out) / "tgt.vocab").string());

  std::ofstream trees = open_out((fs::path(a.out) / "trees.jsonl").string());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    CorpusRecord r;
    r.tree_json = tree_to_json(examples[i].tree);
    r.comment = records[i].comment;
    write_record_jsonl(trees, r);
  }
  trees.close();

  const std::size_t issues = report_lint(examples, tgt, AlignmentOptions{}, io.err);
  io.out << "examples " << examples.size() << "\nsource_vocab " << src.size()
         << "\ntarget_vocab " << tgt.size() << "\nunreachable_tokens " << issues << "\n";
  m.finished = utc_timestamp();
  write_manifest(manifest_path, m);
  return a.strict && issues > 0 ? kExitData : kExitOk;
}

// ---------------------------------------------------------------- stats

int cmd_stats(const std::vector<std::string>& files, const std::string& grammar_name, Io io) {
  std::optional<Grammar> grammar;
  if (!grammar_name.empty()) grammar = grammar_registry(grammar_name);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %-10s %8s %16s %14s %17s %13s\n", "Dataset", "Split",
                "Type Num", "Avail. Types Num", "Max Tree Depth", "Avg Tree Node Num",
                "Max Child Num");
  io.out << buf;
  for (const auto& f : files) {
    const auto trees = read_trees(f, grammar ? &*grammar : nullptr);
    const Grammar g = grammar ? *grammar : grammar_registry(trees.front().grammar());
    for (const auto& t : trees) {
      if (t.grammar() != g.name) {
        throw ValidationError(f + ": mixes grammars " + g.name + " and " + t.grammar());
      }
    }
    const TreeStats s = tree_stats(trees);
    const std::string split = fs::path(f).stem().string();
    std::snprintf(buf, sizeof buf, "%-10s %-10s %8zu %16zu %14zu %17.2f %13zu\n", g.name.c_str(),
                  split.c_str(), g.types.size(), g.available_types.size(), s.max_depth,
                  s.avg_node_count, s.max_child_count);
    io.out << buf;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config;
  std::string train;
  std::string dev;
  std::string out;
  std::vector<std::string> sets;
  std::string init;
  std::string lambda_types;
};

std::vector<Example> load_split(const std::string& path, const Grammar& g,
                                const LambdaTypeTable& table) {
  const auto records = read_corpus(path);
  auto examples = load_examples(records, &g, table);
  if (examples.empty()) throw ValidationError(path + ": no examples");
  return examples;
}

int cmd_train(const TrainArgs& a, const std::vector<std::string>& argv, Io io) {
  TrainConfig cfg;
  if (!a.config.empty()) cfg = load_config(a.config);
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  validate_config(cfg);

  fs::create_directories(a.out);
  const fs::path out(a.out);
  RunManifest m;
  m.command = "train";
  m.argv = argv;
  m.config = config_to_text(cfg);
  m.seed = cfg.seed;
  m.version = tool_version();
  m.started = utc_timestamp();
  m.input_digests[a.train] = sha256_hex(read_file(a.train));
  if (!a.dev.empty()) m.input_digests[a.dev] = sha256_file(a.dev);
  if (!a.config.empty()) m.input_digests[a.config] = sha256_file(a.config);
  if (!a.lambda_types.empty()) m.input_digests[a.lambda_types] = sha256_file(a.lambda_types);
  const fs::path init(a.init);
  if (!a.init.empty()) {
    for (const char* f : {"best.ckpt", "src.vocab", "tgt.vocab"}) {
      m.input_digests[(init / f).string()] = sha256_file((init / f).string());
    }
  }
  write_manifest((out / "manifest.json").string(), m);
  open_out((out / "config.txt").string()) << m.config;

  const Grammar grammar = grammar_registry(cfg.grammar);
  const LambdaTypeTable table = lambda_table(a.lambda_types);
  const auto train_set = load_split(a.train, grammar, table);
  std::vector<Example> dev;
  if (!a.dev.empty()) dev = load_split(a.dev, grammar, table);

  Vocab src, tgt;
  if (!a.init.empty()) {
    src = Vocab::load((init / "src.vocab").string());
    tgt = Vocab::load((init / "tgt.vocab").string());
  } else {
    src = Vocab::build(source_streams(train_set), cfg.src_min_freq);
    tgt = Vocab::build(target_streams(train_set), cfg.tgt_min_freq);
  }
  src.save((out / "src.vocab").string());
  tgt.save((out / "tgt.vocab").string());

  Model model(grammar, src, tgt, model_config(cfg));
  model.init(cfg.seed);
  if (!a.init.empty()) {
    assign_parameters(model.params(), load_checkpoint((init / "best.ckpt").string()));
  }
  report_lint(train_set, tgt, alignment_options(model), io.err);

  std::ofstream csv = open_out((out / "metrics.csv").string());
  TrainOutputs outputs;
  outputs.checkpoint_dir = a.out;
  outputs.metrics_csv = &csv;
  outputs.log = &io.err;
  const TrainResult r = train(model, train_set, dev, cfg, outputs);
  csv.close();

  char buf[160];
  std::snprintf(buf, sizeof buf, "steps %zu\nbest_step %zu\nbest_dev_bleu4 %.1f\n", r.steps,
                r.best_step, r.best_dev_bleu * 100.0);
  io.out << buf;
  m.finished = utc_timestamp();
  write_manifest((out / "manifest.json").string(), m);
  return kExitOk;
}

// ------------------------------------------------------------- generate

struct GenerateArgs {
  std::string model;
  std::string checkpoint = "best";
  std::string code;
  std::string lang;
  std::string input;
  std::string trace;
  std::size_t max_len = 0;
  std::string lambda_types;
};

int cmd_generate(const GenerateArgs& a, Io io) {
  const fs::path dir(a.model);
  if (!fs::exists(dir / "config.txt")) throw ValidationError(a.model + " is not a run directory");
  const TrainConfig cfg = load_config((dir / "config.txt").string());
  Model model(grammar_registry(cfg.grammar), Vocab::load((dir / "src.vocab").string()),
              Vocab::load((dir / "tgt.vocab").string()), model_config(cfg));
  model.init(cfg.seed);
  std::string ckpt = a.checkpoint;
  if (ckpt == "best" || ckpt == "last") ckpt = (dir / (ckpt + ".ckpt")).string();
  assign_parameters(model.params(), load_checkpoint(ckpt));

  const LambdaTypeTable table = lambda_table(a.lambda_types);
  std::vector<TokenTypeTree> trees;
  if (!a.code.empty()) {
    std::string lang = a.lang;
    if (lang.empty()) lang = cfg.grammar == "atis" ? "lambda" : "sql";
    trees.push_back(parse_code(a.code, lang, table));
    validate(trees.back(), model.grammar());
  } else if (!a.input.empty()) {
    for (auto& e : load_examples(read_corpus(a.input), &model.grammar(), table)) {
      trees.push_back(std::move(e.tree));
    }
  } else {
    throw ConfigError("generate needs --code or --input");
  }

  std::unique_ptr<std::ofstream> trace;
  if (!a.trace.empty()) trace = std::make_unique<std::ofstream>(open_out(a.trace));
  const std::size_t max_len = a.max_len ? a.max_len : cfg.max_len;
  for (const auto& t : trees) {
    const Trajectory tr = decode_greedy(model, t, max_len, trace.get());
    io.out << join_tokens(tr.tokens) << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string candidates;
  std::string references;
  std::string label;
  bool rouge_recall = false;
  std::string smoothing = "none";
};

int cmd_evaluate(const EvaluateArgs& a, Io io) {
  const auto cand_lines = read_lines(a.candidates);
  auto ref_lines = read_lines(a.references);
  if (cand_lines.size() != ref_lines.size()) {
    throw ValidationError(std::to_string(cand_lines.size()) + " candidates vs " +
                          std::to_string(ref_lines.size()) + " references");
  }
  std::vector<Tokens> cands, refs;
  for (std::size_t i = 0; i < cand_lines.size(); ++i) {
    cands.push_back(tokenize_or_empty(cand_lines[i]));
    refs.push_back(tokenize_or_empty(ref_lines[i]));
    if (refs.back().empty()) {
      throw ValidationError("reference line " + std::to_string(i + 1) + " is empty");
    }
  }
  CorpusOptions opt;
  opt.rouge_variant = a.rouge_recall ? RougeVariant::kRecall : RougeVariant::kF1;
  if (a.smoothing == "add-one") {
    opt.bleu_smoothing = Smoothing::kAddOne;
  } else if (a.smoothing != "none") {
    throw ConfigError("--smoothing must be none or add-one");
  }
  io.out << format_report(corpus_eval(cands, refs, opt), a.label);
  return kExitOk;
}

// ------------------------------------------------------------ gradcheck

int cmd_gradcheck(std::uint64_t seed, double tolerance, Io io) {
  bool ok = true;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-28s %14s %8s  %s\n", "check", "max_rel_error", "coords",
                "worst");
  io.out << buf;
  for (const auto& e : run_gradcheck_suite(seed)) {
    const bool pass = e.result.max_relative_error < tolerance;
    ok = ok && pass;
    std::snprintf(buf, sizeof buf, "%-28s %14.3e %8zu  %s[%zu]%s\n", e.name.c_str(),
                  e.result.max_relative_error, e.result.coords_checked,
                  e.result.worst_param.c_str(), e.result.worst_index, pass ? "" : "  FAIL");
    io.out << buf;
  }
  return ok ? kExitOk : kExitNumeric;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Io io{out, err};
  CLI::App app{"Type-auxiliary guided code comment generation", "tag"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "write a synthetic corpus as JSONL");
  s_synth->add_option("--grammar", synth.grammar, "wikisql or atis")->required();
  s_synth->add_option("--n", synth.n, "number of examples")->required();
  s_synth->add_option("--seed", synth.seed, "random seed");
  s_synth->add_option("--oov-fraction", synth.oov_fraction, "share of fresh literals");
  s_synth->add_option("--out", synth.out, "output file (default stdout)");

  PreprocessArgs pre;
  auto* s_pre = app.add_subcommand("preprocess", "corpus JSONL -> trees, vocabularies");
  s_pre->add_option("--corpus", pre.corpus, "corpus JSONL ('-' for stdin)")->required();
  s_pre->add_option("--out", pre.out, "output directory")->required();
  s_pre->add_option("--grammar", pre.grammar, "validate against this grammar");
  s_pre->add_option("--src-min-freq", pre.src_min_freq, "source vocabulary threshold");
  s_pre->add_option("--tgt-min-freq", pre.tgt_min_freq, "target vocabulary threshold");
  s_pre->add_option("--lambda-types", pre.lambda_types, "lambda head/type table");
  s_pre->add_flag("--strict", pre.strict, "exit 2 when the linter finds unreachable tokens");

  std::vector<std::string> stats_files;
  std::string stats_grammar;
  auto* s_stats = app.add_subcommand("stats", "tree statistics table");
  s_stats->add_option("--trees", stats_files, "tree JSONL file(s), one split each")->required();
  s_stats->add_option("--grammar", stats_grammar, "grammar (default: from the trees)");

  TrainArgs tr;
  auto* s_train = app.add_subcommand("train", "train a model into a run directory");
  s_train->add_option("--config", tr.config, "key=value config file");
  s_train->add_option("--train", tr.train, "training corpus JSONL")->required();
  s_train->add_option("--dev", tr.dev, "dev corpus JSONL");
  s_train->add_option("--out", tr.out, "run directory")->required();
  s_train->add_option("--set", tr.sets, "config override key=value (repeatable)");
  s_train->add_option("--init", tr.init, "warm start from a previous run directory");
  s_train->add_option("--lambda-types", tr.lambda_types, "lambda head/type table");

  GenerateArgs gen;
  auto* s_gen = app.add_subcommand("generate", "comment code with a trained model");
  s_gen->add_option("--model", gen.model, "run directory")->required();
  s_gen->add_option("--checkpoint", gen.checkpoint, "best, last or a checkpoint path");
  s_gen->add_option("--code", gen.code, "source code to comment");
  s_gen->add_option("--lang", gen.lang, "sql or lambda (default from the grammar)");
  s_gen->add_option("--input", gen.input, "corpus JSONL of code records");
  s_gen->add_option("--trace", gen.trace, "write per-step decoder traces (JSONL)");
  s_gen->add_option("--max-len", gen.max_len, "maximum decoding actions");
  s_gen->add_option("--lambda-types", gen.lambda_types, "lambda head/type table");

  EvaluateArgs ev;
  auto* s_eval = app.add_subcommand("evaluate", "BLEU-4 / ROUGE-2 / ROUGE-L report");
  s_eval->add_option("--candidates", ev.candidates, "one candidate per line")->required();
  s_eval->add_option("--references", ev.references, "one reference per line")->required();
  s_eval->add_option("--label", ev.label, "row label");
  s_eval->add_flag("--rouge-recall", ev.rouge_recall, "recall-only ROUGE");
  s_eval->add_option("--smoothing", ev.smoothing, "corpus BLEU smoothing: none or add-one")
      ->check(CLI::IsMember({"none", "add-one"}));

  std::uint64_t gc_seed = 7;
  double gc_tol = 1e-4;
  auto* s_gc = app.add_subcommand("gradcheck", "finite-difference gradient suite");
  s_gc->add_option("--seed", gc_seed, "random seed");
  s_gc->add_option("--tolerance", gc_tol, "maximum relative error");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  std::vector<std::string> argv{"tag"};
  argv.insert(argv.end(), args.begin(), args.end());
  try {
    if (*s_synth) return cmd_synth(synth, io);
    if (*s_pre) return cmd_preprocess(pre, argv, io);
    if (*s_stats) return cmd_stats(stats_files, stats_grammar, io);
    if (*s_train) return cmd_train(tr, argv, io);
    if (*s_gen) return cmd_generate(gen, io);
    if (*s_eval) return cmd_evaluate(ev, io);
    if (*s_gc) return cmd_gradcheck(gc_seed, gc_tol, io);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace tag
