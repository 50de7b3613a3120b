#pragma once

// Plain recursive N-ary Tree-LSTM evaluated with the parameters of a
// ParamStore. With `type_blind` every lookup uses the collapsed key "*",
// which makes it the textbook N-ary Tree-LSTM; otherwise W/b are keyed by the
// node type (forget gate: the k-th child's type) and U by (slot, child type).

#include <string>

#include "oracles.hpp"
#include "tag/corpus/vocab.hpp"
#include "tag/numcore/param_store.hpp"
#include "tag/treelang/tree.hpp"

namespace tag::oracle {

struct CellState {
  Vec h;
  Vec c;
};

class TreeLstmOracle {
 public:
  TreeLstmOracle(const ParamStore& store, const Vocab& vocab, std::size_t hidden, bool type_blind)
      : store_(store), vocab_(vocab), d_(hidden), blind_(type_blind) {}

  Mat matrix(const std::string& name) const {
    const Tensor& t = store_.get(name);
    Mat m(t.dim(0), Vec(t.dim(1)));
    for (std::size_t r = 0; r < t.dim(0); ++r) {
      for (std::size_t c = 0; c < t.dim(1); ++c) m[r][c] = t.at(r, c);
    }
    return m;
  }

  Vec vector(const std::string& name) const { return store_.get(name).values(); }

  std::string key(const std::string& type) const { return blind_ ? "*" : type; }

  std::string name(char gate, char kind, std::size_t slot, std::size_t k,
                   const std::string& type) const {
    std::string n = std::string("enc.") + gate + "." + kind;
    if (slot) n += "[slot=" + std::to_string(slot) + "]";
    if (k) n += "[k=" + std::to_string(k) + "]";
    return n + "[type=" + key(type) + "]";
  }

  Vec embed(const std::vector<std::string>& tokens) const {
    Vec x(d_, 0.0);
    if (tokens.empty()) return x;
    const Mat e = matrix("enc.emb");
    for (const auto& t : tokens) x = plus(x, e[vocab_.id(t)]);
    for (auto& v : x) v /= static_cast<double>(tokens.size());
    return x;
  }

  CellState eval(const TokenTypeTree& tree, std::size_t id) const {
    const TreeNode& node = tree.node(id);
    std::vector<CellState> kids;
    std::vector<std::string> kid_types;
    for (std::size_t c : node.children) {
      kids.push_back(eval(tree, c));
      kid_types.push_back(tree.node(c).type);
    }
    const Vec x = embed(node.tokens);
    auto pre = [&](char g, const std::string& wb_type, std::size_t k) {
      Vec a = plus(matvec(matrix(name(g, 'W', 0, 0, wb_type)), x), vector(name(g, 'b', 0, 0, wb_type)));
      for (std::size_t l = 0; l < kids.size(); ++l) {
        a = plus(a, matvec(matrix(name(g, 'U', l + 1, k, kid_types[l])), kids[l].h));
      }
      return a;
    };
    const Vec i = apply(pre('i', node.type, 0), sigm);
    const Vec o = apply(pre('o', node.type, 0), sigm);
    const Vec u = apply(pre('u', node.type, 0), tanh_);
    Vec c = hadamard(i, u);
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const Vec f = apply(pre('f', kid_types[k], k + 1), sigm);
      c = plus(c, hadamard(f, kids[k].c));
    }
    return {hadamard(o, apply(c, tanh_)), c};
  }

 private:
  const ParamStore& store_;
  const Vocab& vocab_;
  std::size_t d_;
  bool blind_;
};

}  // namespace tag::oracle
