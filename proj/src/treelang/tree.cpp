#include "tag/treelang/tree.hpp"

#include <algorithm>

#include "tag/error.hpp"

namespace tag {

void Grammar::check() const {
  if (max_arity == 0) throw ConfigError("grammar " + name + ": max arity must be positive");
  for (const auto& t : available_types) {
    if (!has_type(t)) {
      throw ConfigError("grammar " + name + ": available type '" + t + "' is not a grammar type");
    }
  }
}

std::vector<std::string> known_grammars() { return {"atis", "wikisql"}; }

Grammar grammar_registry(const std::string& name) {
  if (name == "wikisql") {
    return Grammar{"wikisql",
                   {"stmt", "agg_op", "column_name", "cond_expr", "cmp_op", "string"},
                   {"column_name", "string"},
                   4};
  }
  if (name == "atis") {
    return Grammar{"atis",
                   {"expr", "var", "var_type", "ent", "num", "pred", "cmp_op"},
                   {"var", "ent", "num", "var_type", "pred"},
                   15};
  }
  std::string known;
  for (const auto& g : known_grammars()) known += (known.empty() ? "" : ", ") + g;
  throw ConfigError("unknown grammar '" + name + "' (known: " + known + ")");
}

std::size_t TokenTypeTree::add_node(std::string type, std::vector<std::string> tokens,
                                    std::size_t parent) {
  const std::size_t id = nodes_.size();
  if (id > 0) {
    if (parent >= id) throw ValidationError("add_node: parent must precede child");
    nodes_[parent].children.push_back(id);
  }
  nodes_.push_back(TreeNode{std::move(type), std::move(tokens), {}});
  return id;
}

std::size_t TokenTypeTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> d(nodes_.size(), 0);
  d[0] = 1;
  std::size_t best = 1;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t c : nodes_[i].children) {
      d[c] = d[i] + 1;
      best = std::max(best, d[c]);
    }
  }
  return best;
}

std::size_t TokenTypeTree::max_child_count() const {
  std::size_t best = 0;
  for (const auto& n : nodes_) best = std::max(best, n.children.size());
  return best;
}

std::vector<std::size_t> TokenTypeTree::bottom_up_order() const {
  // Children always have larger ids than their parent.
  std::vector<std::size_t> order(nodes_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = order.size() - 1 - i;
  return order;
}

void validate_structure(const TokenTypeTree& tree) {
  if (tree.empty()) throw ValidationError("tree has no nodes");
  std::vector<int> parents(tree.size(), 0);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    for (std::size_t c : tree.node(i).children) {
      if (c >= tree.size()) {
        throw ValidationError("node " + std::to_string(i) + " has unknown child " +
                              std::to_string(c));
      }
      if (c <= i) {
        throw ValidationError("node " + std::to_string(c) + " does not follow its parent " +
                              std::to_string(i));
      }
      if (++parents[c] > 1) {
        throw ValidationError("node " + std::to_string(c) + " has more than one parent");
      }
    }
  }
  for (std::size_t i = 1; i < tree.size(); ++i) {
    if (parents[i] == 0) throw ValidationError("node " + std::to_string(i) + " is unreachable");
  }
}

void validate(const TokenTypeTree& tree, const Grammar& grammar) {
  validate_structure(tree);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const TreeNode& n = tree.node(i);
    if (!grammar.has_type(n.type)) {
      throw ValidationError("node " + std::to_string(i) + " has type '" + n.type +
                            "' outside grammar " + grammar.name);
    }
    if (n.children.size() > grammar.max_arity) {
      throw ValidationError("node " + std::to_string(i) + " has " +
                            std::to_string(n.children.size()) + " children, grammar " +
                            grammar.name + " allows " + std::to_string(grammar.max_arity));
    }
  }
}

}  // namespace tag
