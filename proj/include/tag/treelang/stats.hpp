#pragma once

#include <cstddef>
#include <span>

#include "tag/treelang/tree.hpp"

namespace tag {

struct TreeStats {
  std::size_t max_depth = 0;
  double avg_node_count = 0.0;
  std::size_t max_child_count = 0;
  std::size_t tree_count = 0;
};

// Root depth is 1. Throws ValidationError on an empty collection.
TreeStats tree_stats(std::span<const TokenTypeTree> trees);

}  // namespace tag
