#include <cctype>
#include <fstream>
#include <sstream>

#include "tag/error.hpp"
#include "tag/treelang/parsers.hpp"

namespace tag {

const LambdaTypeTable& LambdaTypeTable::defaults() {
  static const LambdaTypeTable table = [] {
    LambdaTypeTable t;
    for (const char* h : {"lambda", "exists", "and", "or", "not", "the", "argmax", "argmin",
                          "max", "min", "count", "sum"}) {
      t.heads[h] = "expr";
    }
    for (const char* h : {"=", "<", ">", "<=", ">="}) t.heads[h] = "cmp_op";
    for (const char* v : {"e", "i", "t", "ci", "ap", "al", "fl", "da", "mn", "cl", "ti", "pd",
                          "dc", "hr", "rc", "fb", "ac", "st", "dn", "yr", "ci:t", "ap:t"}) {
      t.var_types.insert(v);
    }
    return t;
  }();
  return table;
}

LambdaTypeTable LambdaTypeTable::parse(std::string_view text) {
  LambdaTypeTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string key, value, extra;
    if (!(fields >> key)) continue;
    if (!(fields >> value) || (fields >> extra)) {
      throw ConfigError("lambda type table line " + std::to_string(lineno) +
                        ": expected two fields");
    }
    if (key == "var_type") {
      t.var_types.insert(value);
    } else if (key == "default") {
      t.default_head_type = value;
    } else {
      t.heads[key] = value;
    }
  }
  return t;
}

LambdaTypeTable LambdaTypeTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lambda type table: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

namespace {

struct Atom {
  std::string text;
  std::size_t offset;
};

bool is_variable(const std::string& a) {
  if (a.size() < 2 || a[0] != '$') return false;
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(a[i]))) return false;
  }
  return true;
}

bool is_numeral(const std::string& a) {
  std::size_t i = (a[0] == '-') ? 1 : 0;
  if (i >= a.size()) return false;
  bool digits = false, dot = false;
  for (; i < a.size(); ++i) {
    const char c = a[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      return false;
    }
  }
  return digits;
}

class LambdaParser {
 public:
  LambdaParser(std::string_view src, const LambdaTypeTable& table) : src_(src), table_(table) {}

  TokenTypeTree parse() {
    TokenTypeTree tree("atis");
    skip_space();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    term(tree, TokenTypeTree::kNoParent);
    skip_space();
    if (pos_ < src_.size()) {
      if (src_[pos_] == ')') throw ParseError("unbalanced ')'", pos_);
      throw ParseError("trailing input after expression", pos_);
    }
    return tree;
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  Atom atom() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
           src_[pos_] != '(' && src_[pos_] != ')') {
      ++pos_;
    }
    return {std::string(src_.substr(start, pos_ - start)), start};
  }

  std::string atom_type(const std::string& a) const {
    if (is_variable(a)) return "var";
    if (is_numeral(a)) return "num";
    if (table_.var_types.count(a)) return "var_type";
    return "ent";
  }

  void term(TokenTypeTree& tree, std::size_t parent) {
    skip_space();
    if (pos_ >= src_.size()) throw ParseError("unbalanced '(': input ended", pos_);
    const char c = src_[pos_];
    if (c == ')') throw ParseError("unbalanced ')'", pos_);
    if (c != '(') {
      Atom a = atom();
      tree.add_node(atom_type(a.text), {a.text}, parent);
      return;
    }
    const std::size_t open = pos_++;
    skip_space();
    if (pos_ >= src_.size()) throw ParseError("unbalanced '(' opened", open);
    if (src_[pos_] == ')') throw ParseError("empty expression", open);
    if (src_[pos_] == '(') throw ParseError("application head must be an atom", pos_);
    Atom head = atom();
    auto it = table_.heads.find(head.text);
    const std::string& type = it != table_.heads.end() ? it->second : table_.default_head_type;
    const std::size_t id = tree.add_node(type, {head.text}, parent);
    for (;;) {
      skip_space();
      if (pos_ >= src_.size()) throw ParseError("unbalanced '(' opened", open);
      if (src_[pos_] == ')') {
        ++pos_;
        return;
      }
      term(tree, id);
    }
  }

  std::string_view src_;
  const LambdaTypeTable& table_;
  std::size_t pos_ = 0;
};

}  // namespace

TokenTypeTree parse_lambda(std::string_view text, const LambdaTypeTable& table) {
  return LambdaParser(text, table).parse();
}

}  // namespace tag
