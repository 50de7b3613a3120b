#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tag/numcore/gradcheck.hpp"

namespace tag {

struct GradCheckEntry {
  std::string name;
  GradCheckResult result;
};

// Finite-difference checks over every differentiable piece: each numcore
// primitive, encode_tree on a leaf, the SQL golden tree and a lambda tree,
// several decoder steps (attention, both heads, masked and decayed copy
// distribution) and mle_loss on copy- and generate-aligned examples.
std::vector<GradCheckEntry> run_gradcheck_suite(std::uint64_t seed = 7);

// The SQL statement whose tree is the committed golden fixture.
inline constexpr const char* kGoldenSql =
    "SELECT MAX(Capacity) FROM table WHERE Stadium = 'Otkrytie Arena'";
inline constexpr const char* kGoldenSqlComment =
    "what is the maximum capacity when stadium is otkrytie arena ?";

}  // namespace tag
