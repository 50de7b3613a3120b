#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tag/corpus/vocab.hpp"
#include "tag/numcore/graph.hpp"
#include "tag/numcore/param_store.hpp"
#include "tag/treelang/tree.hpp"

namespace tag {

struct EncoderConfig {
  std::size_t hidden = 64;
  // false collapses every grammar type onto one parameter set (the
  // type-association ablation).
  bool type_assoc = true;
  // Share forget-gate recurrent weights across gate index k.
  bool k_tied = false;
};

// Type key used in parameter names: the grammar type, or "*" when types are
// collapsed.
std::string encoder_type_key(const std::string& type, const EncoderConfig& config);

// "enc.<gate>.<W|U|b>[slot=l][k=k][type=t]"; slot and k are 1-based and
// omitted when 0.
std::string encoder_param_name(char gate, char kind, std::size_t slot, std::size_t k,
                               const std::string& type_key);

// Registers the source embedding table "enc.emb" and every gate tensor for
// each type of `grammar` and each child slot 1..N. Matrices get Xavier
// initialisation, biases start at zero. Absent children carry zero state and
// so never reach a parameter; no PAD-type tensors are created.
void register_encoder_params(ParamStore& store, const Grammar& grammar,
                             std::size_t source_vocab_size, const EncoderConfig& config, Rng& rng);

// Mean of the embedding rows; an empty id list gives a zero vector.
Expr embed_node(Graph& g, Expr table, const std::vector<std::size_t>& ids, std::size_t hidden);

struct EncoderOutput {
  std::vector<Expr> h;  // indexed by node id
  std::vector<Expr> c;
  Expr root() const { return h.at(0); }
};

EncoderOutput encode_tree(Graph& g, ParamStore& store, const TokenTypeTree& tree,
                          const Grammar& grammar, const Vocab& source_vocab,
                          const EncoderConfig& config);

}  // namespace tag
