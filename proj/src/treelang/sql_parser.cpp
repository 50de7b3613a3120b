#include <cctype>
#include <optional>

#include "tag/error.hpp"
#include "tag/treelang/parsers.hpp"

namespace tag {

namespace {

enum class Tok { kWord, kNumber, kString, kSymbol, kEnd };

struct Lexeme {
  Tok kind;
  std::string text;
  std::size_t offset;
};

class SqlLexer {
 public:
  explicit SqlLexer(std::string_view src) : src_(src) {}

  Lexeme next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::kEnd, "", start};
    const char c = src_[pos_];
    if (c == '\'' || c == '"') {
      const std::size_t close = src_.find(c, pos_ + 1);
      if (close == std::string_view::npos) throw ParseError("unterminated quoted literal", start);
      pos_ = close + 1;
      return {Tok::kString, std::string(src_.substr(start + 1, close - start - 1)), start};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      return {Tok::kWord, std::string(src_.substr(start, pos_ - start)), start};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '-' || c == '.') && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      ++pos_;
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
        ++pos_;
      }
      return {Tok::kNumber, std::string(src_.substr(start, pos_ - start)), start};
    }
    static constexpr std::string_view kTwoChar[] = {">=", "<=", "!=", "<>"};
    for (auto op : kTwoChar) {
      if (src_.substr(pos_, 2) == op) {
        pos_ += 2;
        return {Tok::kSymbol, std::string(op), start};
      }
    }
    ++pos_;
    return {Tok::kSymbol, std::string(1, c), start};
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
};

std::string upper(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

bool is_aggregate(const std::string& word) {
  const std::string u = upper(word);
  return u == "MAX" || u == "MIN" || u == "COUNT" || u == "SUM" || u == "AVG";
}

bool is_cmp(const std::string& s) {
  return s == "=" || s == ">" || s == "<" || s == ">=" || s == "<=" || s == "!=" || s == "<>";
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

class SqlParser {
 public:
  explicit SqlParser(std::string_view text) : lexer_(text) { advance(); }

  TokenTypeTree parse() {
    TokenTypeTree tree("wikisql");
    expect_keyword("SELECT");
    const std::size_t root = tree.add_node("stmt", {"SELECT"});

    if (cur_.kind == Tok::kWord && is_aggregate(cur_.text) && peek_is_paren()) {
      const std::size_t agg = tree.add_node("agg_op", {upper(cur_.text)}, root);
      advance();
      expect_symbol("(");
      tree.add_node("column_name", {column()}, agg);
      expect_symbol(")");
    } else {
      tree.add_node("column_name", {column()}, root);
    }

    expect_keyword("FROM");
    if (cur_.kind != Tok::kWord) throw ParseError("expected table name", cur_.offset);
    advance();

    if (is_keyword("WHERE")) {
      advance();
      condition(tree, root, "WHERE");
      while (is_keyword("AND")) {
        advance();
        condition(tree, root, "AND");
      }
    }
    if (cur_.kind == Tok::kSymbol && cur_.text == ";") advance();
    if (cur_.kind != Tok::kEnd) {
      throw ParseError("unexpected trailing input '" + cur_.text + "'", cur_.offset);
    }
    return tree;
  }

 private:
  void advance() {
    cur_ = lookahead_ ? std::move(*lookahead_) : lexer_.next();
    lookahead_.reset();
  }

  bool peek_is_paren() {
    if (!lookahead_) lookahead_ = lexer_.next();
    return lookahead_->kind == Tok::kSymbol && lookahead_->text == "(";
  }

  bool is_keyword(const char* kw) const {
    return cur_.kind == Tok::kWord && upper(cur_.text) == kw;
  }

  void expect_keyword(const char* kw) {
    if (!is_keyword(kw)) {
      throw ParseError(std::string("expected ") + kw +
                           (cur_.kind == Tok::kEnd ? " but input ended" : ", found '" + cur_.text + "'"),
                       cur_.offset);
    }
    advance();
  }

  void expect_symbol(const char* sym) {
    if (cur_.kind != Tok::kSymbol || cur_.text != sym) {
      throw ParseError(std::string("expected '") + sym + "'", cur_.offset);
    }
    advance();
  }

  std::string column() {
    if (cur_.kind != Tok::kWord || is_keyword("FROM") || is_keyword("WHERE") || is_keyword("AND")) {
      throw ParseError("expected column name", cur_.offset);
    }
    std::string name = cur_.text;
    advance();
    return name;
  }

  void condition(TokenTypeTree& tree, std::size_t root, const char* keyword) {
    const std::size_t cond = tree.add_node("cond_expr", {keyword}, root);
    tree.add_node("column_name", {column()}, cond);
    if (cur_.kind != Tok::kSymbol || !is_cmp(cur_.text)) {
      throw ParseError("unknown comparison operator '" + cur_.text + "'", cur_.offset);
    }
    tree.add_node("cmp_op", {cur_.text}, cond);
    advance();
    if (cur_.kind == Tok::kString) {
      tree.add_node("string", split_words(cur_.text), cond);
    } else if (cur_.kind == Tok::kNumber) {
      tree.add_node("string", {cur_.text}, cond);
    } else {
      throw ParseError("expected literal value", cur_.offset);
    }
    advance();
  }

  SqlLexer lexer_;
  Lexeme cur_{Tok::kEnd, "", 0};
  std::optional<Lexeme> lookahead_;
};

}  // namespace

TokenTypeTree parse_sql(std::string_view text) { return SqlParser(text).parse(); }

}  // namespace tag
