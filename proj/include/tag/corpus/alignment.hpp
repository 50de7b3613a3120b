#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tag/corpus/vocab.hpp"
#include "tag/treelang/tree.hpp"

namespace tag {

// One decoding action under teacher forcing: either a single generated token
// or a copy of a node whose whole surface equals the next `length` tokens.
struct TargetSegment {
  std::size_t start = 0;
  std::size_t length = 1;
  // Target-vocab id the generate branch must emit, or -1 when it cannot.
  long long gen_id = -1;
  // Copyable nodes whose surface matches the segment.
  std::vector<std::size_t> copy_nodes;
  // Token fed to the next decoder step.
  std::string last_token;
};

struct AlignmentOptions {
  bool use_mask = true;   // only available-type nodes may be copied
  bool allow_copy = true;
  // Generate branch scores out-of-vocabulary targets as <unk>. Only used by
  // the generate-only baseline.
  bool oov_as_unk = false;
};

// Greedy longest-match segmentation of `target` followed by an EOS segment.
std::vector<TargetSegment> align_target(const TokenTypeTree& tree, const Grammar& grammar,
                                        const std::vector<std::string>& target,
                                        const Vocab& target_vocab,
                                        const AlignmentOptions& options = {});

// Which nodes the copy branch may point at.
std::vector<bool> copyable_nodes(const TokenTypeTree& tree, const Grammar& grammar, bool use_mask);

struct LintIssue {
  std::size_t example = 0;
  std::size_t position = 0;
  std::string token;
};

// Target positions no action can produce (neither in the vocabulary nor
// covered by a copyable node).
std::vector<LintIssue> lint_example(const TokenTypeTree& tree, const Grammar& grammar,
                                    const std::vector<std::string>& target,
                                    const Vocab& target_vocab, std::size_t example_index = 0,
                                    const AlignmentOptions& options = {});

}  // namespace tag
