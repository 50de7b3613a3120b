#pragma once

#include <string>

#include <json.hpp>

#include "tag/treelang/tree.hpp"

namespace tag {

inline constexpr int kTreeFormatVersion = 1;

// {"format_version": 1, "grammar": str, "root": int,
//  "nodes": [{"id": int, "type": str, "tokens": [str], "children": [int]}]}
nlohmann::json tree_to_json_value(const TokenTypeTree& tree);
std::string tree_to_json(const TokenTypeTree& tree);

// Ids may be arbitrary distinct integers. Documents whose ids are already
// parent-before-child keep that order; otherwise nodes are re-indexed in
// pre-order from the root. Validates against `grammar`.
TokenTypeTree tree_from_json_value(const nlohmann::json& doc, const Grammar& grammar);
TokenTypeTree tree_from_json(const std::string& text, const Grammar& grammar);
// Resolves the grammar from the document's "grammar" field via the registry.
TokenTypeTree tree_from_json(const std::string& text);

nlohmann::json grammar_to_json(const Grammar& grammar);
Grammar grammar_from_json(const nlohmann::json& doc);

}  // namespace tag
