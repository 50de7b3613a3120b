#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace tag {

// A dataset's grammar-type set, the subset the decoder may copy from, and the
// maximum child count N.
struct Grammar {
  std::string name;
  std::set<std::string> types;
  std::set<std::string> available_types;
  std::size_t max_arity = 1;

  bool has_type(const std::string& t) const { return types.count(t) != 0; }
  bool is_available(const std::string& t) const { return available_types.count(t) != 0; }
  // Throws ConfigError if available_types is not a subset of types or N is 0.
  void check() const;
};

// Known grammars: "wikisql", "atis". Throws ConfigError listing them otherwise.
Grammar grammar_registry(const std::string& name);
std::vector<std::string> known_grammars();

struct TreeNode {
  std::string type;
  std::vector<std::string> tokens;
  std::vector<std::size_t> children;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Rooted ordered tree whose node ids are their positions in `nodes` and
// follow a parent-before-child order, so the root is always node 0.
class TokenTypeTree {
 public:
  TokenTypeTree() = default;
  explicit TokenTypeTree(std::string grammar) : grammar_(std::move(grammar)) {}

  // Appends a node; `parent` must already exist (ignored for the first node).
  std::size_t add_node(std::string type, std::vector<std::string> tokens,
                       std::size_t parent = kNoParent);

  const std::string& grammar() const { return grammar_; }
  void set_grammar(std::string g) { grammar_ = std::move(g); }
  std::size_t root() const { return 0; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const TreeNode& node(std::size_t id) const { return nodes_.at(id); }
  TreeNode& node(std::size_t id) { return nodes_.at(id); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  // Depth with the root at depth 1.
  std::size_t depth() const;
  std::size_t max_child_count() const;
  // Post-order ids (children before parents).
  std::vector<std::size_t> bottom_up_order() const;

  friend bool operator==(const TokenTypeTree&, const TokenTypeTree&) = default;

  static constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

 private:
  std::string grammar_;
  std::vector<TreeNode> nodes_;
};

// Structural checks (single root, one parent per node, parent-before-child
// ids) plus grammar membership of every type and arity <= N. Throws
// ValidationError naming the offending node id.
void validate(const TokenTypeTree& tree, const Grammar& grammar);
void validate_structure(const TokenTypeTree& tree);

}  // namespace tag
