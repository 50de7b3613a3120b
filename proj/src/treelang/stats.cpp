#include "tag/treelang/stats.hpp"

#include <algorithm>

#include "tag/error.hpp"

namespace tag {

TreeStats tree_stats(std::span<const TokenTypeTree> trees) {
  if (trees.empty()) throw ValidationError("tree_stats: empty collection");
  TreeStats s;
  std::size_t nodes = 0;
  for (const auto& t : trees) {
    s.max_depth = std::max(s.max_depth, t.depth());
    s.max_child_count = std::max(s.max_child_count, t.max_child_count());
    nodes += t.size();
  }
  s.tree_count = trees.size();
  s.avg_node_count = static_cast<double>(nodes) / static_cast<double>(trees.size());
  return s;
}

}  // namespace tag
