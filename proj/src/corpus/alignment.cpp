#include "tag/corpus/alignment.hpp"

#include <algorithm>

#include "tag/corpus/example.hpp"

namespace tag {

std::vector<bool> copyable_nodes(const TokenTypeTree& tree, const Grammar& grammar,
                                 bool use_mask) {
  std::vector<bool> out(tree.size(), false);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const TreeNode& n = tree.node(i);
    if (n.tokens.empty()) continue;
    out[i] = !use_mask || grammar.is_available(n.type);
  }
  return out;
}

std::vector<TargetSegment> align_target(const TokenTypeTree& tree, const Grammar& grammar,
                                        const std::vector<std::string>& target,
                                        const Vocab& target_vocab,
                                        const AlignmentOptions& options) {
  std::vector<std::vector<std::string>> surfaces(tree.size());
  if (options.allow_copy) {
    const auto copyable = copyable_nodes(tree, grammar, options.use_mask);
    for (std::size_t i = 0; i < tree.size(); ++i) {
      if (copyable[i]) surfaces[i] = copy_surface(tree.node(i));
    }
  }

  auto matches = [&](const std::vector<std::string>& s, std::size_t pos) {
    return !s.empty() && pos + s.size() <= target.size() &&
           std::equal(s.begin(), s.end(), target.begin() + static_cast<std::ptrdiff_t>(pos));
  };

  std::vector<TargetSegment> out;
  std::size_t pos = 0;
  while (pos < target.size()) {
    std::size_t best = 0;
    for (const auto& s : surfaces) {
      if (matches(s, pos)) best = std::max(best, s.size());
    }
    TargetSegment seg;
    seg.start = pos;
    seg.length = std::max<std::size_t>(best, 1);
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
      if (surfaces[i].size() == seg.length && matches(surfaces[i], pos)) seg.copy_nodes.push_back(i);
    }
    if (seg.length == 1) {
      const std::string& tok = target[pos];
      if (target_vocab.contains(tok)) {
        seg.gen_id = static_cast<long long>(target_vocab.id(tok));
      } else if (options.oov_as_unk) {
        seg.gen_id = static_cast<long long>(Vocab::kUnk);
      }
    }
    seg.last_token = target[pos + seg.length - 1];
    pos += seg.length;
    out.push_back(std::move(seg));
  }

  TargetSegment eos;
  eos.start = target.size();
  eos.length = 0;
  eos.gen_id = static_cast<long long>(Vocab::kEos);
  eos.last_token = "<eos>";
  out.push_back(std::move(eos));
  return out;
}

std::vector<LintIssue> lint_example(const TokenTypeTree& tree, const Grammar& grammar,
                                    const std::vector<std::string>& target,
                                    const Vocab& target_vocab, std::size_t example_index,
                                    const AlignmentOptions& options) {
  std::vector<LintIssue> out;
  for (const auto& seg : align_target(tree, grammar, target, target_vocab, options)) {
    if (seg.length > 0 && seg.gen_id < 0 && seg.copy_nodes.empty()) {
      out.push_back({example_index, seg.start, target[seg.start]});
    }
  }
  return out;
}

}  // namespace tag
