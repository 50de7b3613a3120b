#include "tag/corpus/tokenizer.hpp"

#include <cctype>

#include "tag/error.hpp"

namespace tag {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<std::string> tokenize_comment(std::string_view text) {
  std::string s(text);
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };

  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    const char next = i + 1 < s.size() ? s[i + 1] : '\0';
    if (is_space(c)) {
      flush();
      continue;
    }
    if (c == '\'' && cur.empty()) {
      const std::size_t close = s.find('\'', i + 1);
      if (close != std::string::npos && close > i + 1 &&
          (close + 1 == s.size() || !is_alnum(s[close + 1]))) {
        out.push_back(s.substr(i, close - i + 1));
        i = close;
        continue;
      }
    }
    if (is_alnum(c) || c == '_' || c == '$') {
      cur.push_back(c);
      continue;
    }
    const bool inside_word = !cur.empty() && is_alnum(cur.back()) && is_alnum(next);
    if ((c == '-' || c == '\'') && inside_word) {
      cur.push_back(c);
      continue;
    }
    if ((c == '.' || c == ',') && !cur.empty() && is_digit(cur.back()) && is_digit(next)) {
      cur.push_back(c);
      continue;
    }
    flush();
    out.emplace_back(1, c);
  }
  flush();
  if (out.empty()) throw ValidationError("comment has no tokens");
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace tag
