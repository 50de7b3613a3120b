#include "tag/treelang/tree_json.hpp"

#include <map>

#include "tag/error.hpp"

namespace tag {

using nlohmann::json;

json tree_to_json_value(const TokenTypeTree& tree) {
  json nodes = json::array();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const TreeNode& n = tree.node(i);
    nodes.push_back({{"id", i}, {"type", n.type}, {"tokens", n.tokens}, {"children", n.children}});
  }
  return {{"format_version", kTreeFormatVersion},
          {"grammar", tree.grammar()},
          {"root", tree.root()},
          {"nodes", std::move(nodes)}};
}

std::string tree_to_json(const TokenTypeTree& tree) { return tree_to_json_value(tree).dump(); }

namespace {

struct RawNode {
  std::string type;
  std::vector<std::string> tokens;
  std::vector<long long> children;
};

template <class T>
T field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace

TokenTypeTree tree_from_json_value(const json& doc, const Grammar& grammar) {
  if (!doc.is_object()) throw ValidationError("tree document is not an object");
  if (auto v = doc.find("format_version"); v != doc.end() && *v != kTreeFormatVersion) {
    throw ValidationError("unsupported tree format version " + v->dump());
  }
  const auto root = field<long long>(doc, "root", "tree");
  const auto& nodes = doc.find("nodes");
  if (nodes == doc.end() || !nodes->is_array() || nodes->empty()) {
    throw ValidationError("tree: 'nodes' must be a non-empty array");
  }

  std::map<long long, RawNode> raw;
  std::vector<long long> order;
  for (const auto& n : *nodes) {
    if (!n.is_object()) throw ValidationError("tree: node entry is not an object");
    const auto id = field<long long>(n, "id", "node");
    const std::string where = "node " + std::to_string(id);
    RawNode r{field<std::string>(n, "type", where),
              field<std::vector<std::string>>(n, "tokens", where),
              field<std::vector<long long>>(n, "children", where)};
    if (!grammar.has_type(r.type)) {
      throw ValidationError(where + ": type '" + r.type + "' outside grammar " + grammar.name);
    }
    if (!raw.emplace(id, std::move(r)).second) throw ValidationError(where + ": duplicate id");
    order.push_back(id);
  }
  if (!raw.count(root)) throw ValidationError("tree: root " + std::to_string(root) + " not found");

  std::map<long long, int> parent_count;
  for (const auto& [id, r] : raw) {
    for (long long c : r.children) {
      if (!raw.count(c)) {
        throw ValidationError("node " + std::to_string(id) + ": unknown child " +
                              std::to_string(c));
      }
      if (c == root || ++parent_count[c] > 1) {
        throw ValidationError("node " + std::to_string(c) + " has more than one parent");
      }
    }
  }

  // Keep document order when it is already parent-before-child, otherwise
  // fall back to pre-order from the root.
  std::map<long long, std::size_t> position;
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
  bool topological = order.front() == root;
  for (const auto& [id, r] : raw) {
    for (long long c : r.children) topological = topological && position[c] > position[id];
  }
  if (!topological) {
    order.clear();
    std::vector<long long> stack{root};
    while (!stack.empty()) {
      const long long id = stack.back();
      stack.pop_back();
      order.push_back(id);
      const auto& ch = raw[id].children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    if (order.size() != raw.size()) {
      throw ValidationError("tree: some nodes are unreachable from the root");
    }
    position.clear();
    for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
  }

  TokenTypeTree tree(field<std::string>(doc, "grammar", "tree"));
  std::vector<long long> parent_of(order.size(), -1);
  for (long long id : order) {
    for (long long c : raw[id].children) parent_of[position[c]] = static_cast<long long>(position[id]);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    RawNode& r = raw[order[i]];
    if (i > 0 && parent_of[i] < 0) {
      throw ValidationError("node " + std::to_string(order[i]) + " is unreachable from the root");
    }
    tree.add_node(r.type, r.tokens,
                  i == 0 ? TokenTypeTree::kNoParent : static_cast<std::size_t>(parent_of[i]));
  }
  // add_node appends children in id order; restore the document's child order.
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto& ch = tree.node(i).children;
    ch.clear();
    for (long long c : raw[order[i]].children) ch.push_back(position[c]);
  }
  validate(tree, grammar);
  return tree;
}

TokenTypeTree tree_from_json(const std::string& text, const Grammar& grammar) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("tree: malformed JSON: ") + e.what());
  }
  return tree_from_json_value(doc, grammar);
}

TokenTypeTree tree_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("tree: malformed JSON: ") + e.what());
  }
  return tree_from_json_value(doc, grammar_registry(field<std::string>(doc, "grammar", "tree")));
}

json grammar_to_json(const Grammar& g) {
  return {{"format_version", 1},
          {"name", g.name},
          {"types", g.types},
          {"available_types", g.available_types},
          {"max_arity", g.max_arity}};
}

Grammar grammar_from_json(const json& doc) {
  Grammar g;
  g.name = field<std::string>(doc, "name", "grammar");
  auto types = field<std::vector<std::string>>(doc, "types", "grammar");
  auto avail = field<std::vector<std::string>>(doc, "available_types", "grammar");
  g.types = {types.begin(), types.end()};
  g.available_types = {avail.begin(), avail.end()};
  g.max_arity = field<std::size_t>(doc, "max_arity", "grammar");
  g.check();
  return g;
}

}  // namespace tag
