#pragma once

#include <algorithm>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "tag/numcore/param_store.hpp"
#include "tag/treelang/tree_json.hpp"

namespace tag::test {

inline std::string fixture_path(const std::string& name) {
  return std::string(TAG_FIXTURE_DIR) + "/" + name;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline TokenTypeTree golden_tree(const std::string& name) {
  return tree_from_json(read_text(fixture_path(name)));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Random tree over `grammar` with at most `max_nodes` nodes and arity at most
// min(N, max_children). Tokens are drawn from `pool` (0 to 2 per node).
inline TokenTypeTree random_tree(std::mt19937_64& rng, const Grammar& grammar,
                                 std::size_t max_nodes, const std::vector<std::string>& pool,
                                 std::size_t max_children = 3) {
  const std::vector<std::string> types(grammar.types.begin(), grammar.types.end());
  const std::size_t arity = std::min(grammar.max_arity, max_children);
  TokenTypeTree t(grammar.name);
  auto tokens = [&] {
    std::vector<std::string> out;
    const std::size_t n = rng() % 3;
    for (std::size_t i = 0; i < n; ++i) out.push_back(pool[rng() % pool.size()]);
    return out;
  };
  t.add_node(types[rng() % types.size()], tokens());
  const std::size_t target = 1 + rng() % max_nodes;
  while (t.size() < target) {
    const std::size_t parent = rng() % t.size();
    if (t.node(parent).children.size() >= arity) continue;
    t.add_node(types[rng() % types.size()], tokens(), parent);
  }
  return t;
}

// Overwrites every parameter with Uniform(-scale, scale) so that biases and
// all gates are generic.
inline void randomize(ParamStore& store, std::mt19937_64& rng, double scale = 0.5) {
  for (auto& [name, t] : store.entries()) {
    for (auto& v : t.values()) v = uniform(rng, -scale, scale);
  }
}

}  // namespace tag::test
