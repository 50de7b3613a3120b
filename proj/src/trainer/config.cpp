#include "tag/trainer/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tag/error.hpp"

namespace tag {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long n = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || *end != '\0' || errno != 0) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return static_cast<std::size_t>(n);
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno != 0 || !std::isfinite(d)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return d;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string fmt(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

}  // namespace

const std::map<std::string, std::string>& config_key_help() {
  static const std::map<std::string, std::string> keys = {
      {"grammar", "grammar name (wikisql, atis)"},
      {"hidden", "embedding and hidden size D"},
      {"lr", "Adam learning rate"},
      {"batch_size", "examples per optimizer step"},
      {"steps", "optimizer steps to run"},
      {"tt", "steps over which mu falls from 1 to 0"},
      {"gamma", "copy decay rate in (0, 1)"},
      {"reward", "RL reward metric (bleu4, rougeL)"},
      {"src_min_freq", "source vocabulary frequency threshold"},
      {"tgt_min_freq", "target vocabulary frequency threshold"},
      {"seed", "random seed"},
      {"no_type_assoc", "collapse encoder types"},
      {"no_mask", "allow copying from every node type"},
      {"no_decay", "disable copy decay"},
      {"mle_only", "pin mu to 1"},
      {"no_copy", "generate-only baseline"},
      {"k_tied", "share forget-gate U across k"},
      {"grad_clip", "gradient norm clip (0 = off)"},
      {"baseline_decay", "EMA decay of the reward baseline"},
      {"max_len", "maximum decoding actions"},
      {"eval_every", "steps between dev evaluations"},
      {"samples", "sampled trajectories per example"},
  };
  return keys;
}

void set_config_value(TrainConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "grammar") {
    c.grammar = v;
  } else if (key == "hidden") {
    c.hidden = to_size(key, v);
  } else if (key == "lr") {
    c.lr = to_double(key, v);
  } else if (key == "batch_size") {
    c.batch_size = to_size(key, v);
  } else if (key == "steps") {
    c.steps = to_size(key, v);
  } else if (key == "tt") {
    c.tt = to_size(key, v);
  } else if (key == "gamma") {
    c.gamma = to_double(key, v);
  } else if (key == "reward") {
    c.reward = parse_reward_metric(v);
  } else if (key == "src_min_freq") {
    c.src_min_freq = to_size(key, v);
  } else if (key == "tgt_min_freq") {
    c.tgt_min_freq = to_size(key, v);
  } else if (key == "seed") {
    c.seed = to_size(key, v);
  } else if (key == "no_type_assoc") {
    c.no_type_assoc = to_bool(key, v);
  } else if (key == "no_mask") {
    c.no_mask = to_bool(key, v);
  } else if (key == "no_decay") {
    c.no_decay = to_bool(key, v);
  } else if (key == "mle_only") {
    c.mle_only = to_bool(key, v);
  } else if (key == "no_copy") {
    c.no_copy = to_bool(key, v);
  } else if (key == "k_tied") {
    c.k_tied = to_bool(key, v);
  } else if (key == "grad_clip") {
    c.grad_clip = to_double(key, v);
  } else if (key == "baseline_decay") {
    c.baseline_decay = to_double(key, v);
  } else if (key == "max_len") {
    c.max_len = to_size(key, v);
  } else if (key == "eval_every") {
    c.eval_every = to_size(key, v);
  } else if (key == "samples") {
    c.samples = to_size(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

TrainConfig parse_config(const std::string& text, TrainConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key == "format_version") {
      if (trim(line.substr(eq + 1)) != "1") {
        throw ConfigError("config line " + std::to_string(lineno) + ": unsupported format version");
      }
      continue;
    }
    try {
      set_config_value(base, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

TrainConfig load_config(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), base);
}

void validate_config(const TrainConfig& c) {
  grammar_registry(c.grammar);
  if (c.hidden == 0) throw ConfigError("hidden must be >= 1");
  if (!(c.lr > 0.0)) throw ConfigError("lr must be > 0");
  if (c.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (c.tt == 0) throw ConfigError("tt must be >= 1");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (c.src_min_freq == 0 || c.tgt_min_freq == 0) throw ConfigError("min_freq must be >= 1");
  if (c.grad_clip < 0.0) throw ConfigError("grad_clip must be >= 0");
  if (!(c.baseline_decay >= 0.0 && c.baseline_decay < 1.0)) {
    throw ConfigError("baseline_decay must lie in [0, 1)");
  }
  if (c.max_len == 0) throw ConfigError("max_len must be >= 1");
  if (c.eval_every == 0) throw ConfigError("eval_every must be >= 1");
  if (c.samples == 0) throw ConfigError("samples must be >= 1");
}

std::string config_to_text(const TrainConfig& c) {
  auto b = [](bool v) { return v ? "true" : "false"; };
  std::ostringstream o;
  o << "format_version=1\n"
    << "grammar=" << c.grammar << "\n"
    << "hidden=" << c.hidden << "\n"
    << "lr=" << fmt(c.lr) << "\n"
    << "batch_size=" << c.batch_size << "\n"
    << "steps=" << c.steps << "\n"
    << "tt=" << c.tt << "\n"
    << "gamma=" << fmt(c.gamma) << "\n"
    << "reward=" << reward_metric_name(c.reward) << "\n"
    << "src_min_freq=" << c.src_min_freq << "\n"
    << "tgt_min_freq=" << c.tgt_min_freq << "\n"
    << "seed=" << c.seed << "\n"
    << "no_type_assoc=" << b(c.no_type_assoc) << "\n"
    << "no_mask=" << b(c.no_mask) << "\n"
    << "no_decay=" << b(c.no_decay) << "\n"
    << "mle_only=" << b(c.mle_only) << "\n"
    << "no_copy=" << b(c.no_copy) << "\n"
    << "k_tied=" << b(c.k_tied) << "\n"
    << "grad_clip=" << fmt(c.grad_clip) << "\n"
    << "baseline_decay=" << fmt(c.baseline_decay) << "\n"
    << "max_len=" << c.max_len << "\n"
    << "eval_every=" << c.eval_every << "\n"
    << "samples=" << c.samples << "\n";
  return o.str();
}

ModelConfig model_config(const TrainConfig& c) {
  ModelConfig m;
  m.hidden = c.hidden;
  m.type_assoc = !c.no_type_assoc;
  m.k_tied = c.k_tied;
  m.decoder.use_mask = !c.no_mask;
  m.decoder.use_decay = !c.no_decay;
  m.decoder.allow_copy = !c.no_copy;
  m.decoder.gamma = c.gamma;
  return m;
}

}  // namespace tag
