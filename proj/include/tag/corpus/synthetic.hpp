#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tag/corpus/example.hpp"

namespace tag {

struct SyntheticOptions {
  // Probability that an example's first literal is a fresh name that occurs
  // nowhere else in the corpus.
  double oov_fraction = 0.5;
};

// Template-driven (code, comment) pairs for "wikisql" (SQL) or "atis"
// (lambda-calculus). Comments are a deterministic rendering of the code.
std::vector<CorpusRecord> generate_synthetic(std::size_t n, std::uint64_t seed,
                                             const std::string& grammar,
                                             const SyntheticOptions& options = {});

}  // namespace tag
