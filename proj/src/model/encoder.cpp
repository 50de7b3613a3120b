#include "tag/model/encoder.hpp"

#include <utility>

#include "tag/error.hpp"

namespace tag {

std::string encoder_type_key(const std::string& type, const EncoderConfig& config) {
  return config.type_assoc ? type : "*";
}

std::string encoder_param_name(char gate, char kind, std::size_t slot, std::size_t k,
                               const std::string& type_key) {
  std::string name = "enc.";
  name += gate;
  name += '.';
  name += kind;
  if (slot > 0) name += "[slot=" + std::to_string(slot) + "]";
  if (k > 0) name += "[k=" + std::to_string(k) + "]";
  name += "[type=" + type_key + "]";
  return name;
}

void register_encoder_params(ParamStore& store, const Grammar& grammar,
                             std::size_t source_vocab_size, const EncoderConfig& config,
                             Rng& rng) {
  const std::size_t d = config.hidden;
  if (d == 0) throw ConfigError("hidden size must be >= 1");
  store.add("enc.emb", xavier_init({source_vocab_size, d}, rng));

  std::vector<std::string> keys;
  if (config.type_assoc) {
    keys.assign(grammar.types.begin(), grammar.types.end());
  } else {
    keys.push_back("*");
  }
  const std::size_t n = grammar.max_arity;
  for (const auto& t : keys) {
    for (char gate : {'i', 'o', 'u', 'f'}) {
      store.add(encoder_param_name(gate, 'W', 0, 0, t), xavier_init({d, d}, rng));
      store.add(encoder_param_name(gate, 'b', 0, 0, t), Tensor({d}));
      for (std::size_t slot = 1; slot <= n; ++slot) {
        if (gate != 'f') {
          store.add(encoder_param_name(gate, 'U', slot, 0, t), xavier_init({d, d}, rng));
        } else if (config.k_tied) {
          store.add(encoder_param_name('f', 'U', slot, 0, t), xavier_init({d, d}, rng));
        } else {
          for (std::size_t k = 1; k <= n; ++k) {
            store.add(encoder_param_name('f', 'U', slot, k, t), xavier_init({d, d}, rng));
          }
        }
      }
    }
  }
}

Expr embed_node(Graph& g, Expr table, const std::vector<std::size_t>& ids, std::size_t hidden) {
  if (ids.empty()) return g.constant(Tensor({hidden}));
  std::vector<Expr> rows;
  rows.reserve(ids.size());
  for (std::size_t id : ids) rows.push_back(lookup(table, id));
  if (rows.size() == 1) return rows[0];
  return scale(add_all(rows), 1.0 / static_cast<double>(rows.size()));
}

EncoderOutput encode_tree(Graph& g, ParamStore& store, const TokenTypeTree& tree,
                          const Grammar& grammar, const Vocab& source_vocab,
                          const EncoderConfig& config) {
  if (tree.empty()) throw ValidationError("cannot encode an empty tree");
  const std::size_t d = config.hidden;
  Expr emb = g.param(store.get("enc.emb"));
  auto p = [&](char gate, char kind, std::size_t slot, std::size_t k, const std::string& key) {
    return g.param(store.get(encoder_param_name(gate, kind, slot, k, key)));
  };

  EncoderOutput out;
  out.h.resize(tree.size());
  out.c.resize(tree.size());
  for (std::size_t id : tree.bottom_up_order()) {
    const TreeNode& node = tree.node(id);
    if (node.children.size() > grammar.max_arity) {
      throw ValidationError("node " + std::to_string(id) + " has " +
                            std::to_string(node.children.size()) + " children, grammar " +
                            grammar.name + " allows " + std::to_string(grammar.max_arity));
    }
    std::vector<std::size_t> ids;
    for (const auto& t : node.tokens) ids.push_back(source_vocab.id(t));
    const Expr x = embed_node(g, emb, ids, d);
    const std::string key = encoder_type_key(node.type, config);
    std::vector<std::string> child_keys;
    for (std::size_t c : node.children) {
      child_keys.push_back(encoder_type_key(tree.node(c).type, config));
    }

    auto gate = [&](char which) {
      std::vector<std::pair<Expr, Expr>> terms{{p(which, 'W', 0, 0, key), x}};
      for (std::size_t l = 0; l < node.children.size(); ++l) {
        terms.emplace_back(p(which, 'U', l + 1, 0, child_keys[l]), out.h[node.children[l]]);
      }
      return affine(p(which, 'b', 0, 0, key), terms);
    };
    const Expr i = sigmoid(gate('i'));
    const Expr o = sigmoid(gate('o'));
    const Expr u = tanh(gate('u'));

    std::vector<Expr> cell{mul(i, u)};
    for (std::size_t k = 0; k < node.children.size(); ++k) {
      const std::string& kk = child_keys[k];
      std::vector<std::pair<Expr, Expr>> terms{{p('f', 'W', 0, 0, kk), x}};
      for (std::size_t l = 0; l < node.children.size(); ++l) {
        terms.emplace_back(p('f', 'U', l + 1, config.k_tied ? 0 : k + 1, child_keys[l]),
                           out.h[node.children[l]]);
      }
      const Expr f = sigmoid(affine(p('f', 'b', 0, 0, kk), terms));
      cell.push_back(mul(f, out.c[node.children[k]]));
    }
    out.c[id] = cell.size() == 1 ? cell[0] : add_all(cell);
    out.h[id] = mul(o, tanh(out.c[id]));
  }
  return out;
}

}  // namespace tag
