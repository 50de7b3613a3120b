#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace tag {

class Vocab {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kBos = 1;
  static constexpr std::size_t kEos = 2;
  static constexpr std::size_t kUnk = 3;
  static constexpr std::size_t kReserved = 4;

  Vocab();

  // Keeps tokens with frequency >= min_freq, ordered by descending frequency
  // then lexicographically, starting at id 4.
  static Vocab build(const std::vector<std::vector<std::string>>& streams, std::size_t min_freq);

  std::size_t size() const { return tokens_.size(); }
  std::size_t min_freq() const { return min_freq_; }
  bool contains(const std::string& token) const;
  // Unknown tokens map to kUnk.
  std::size_t id(const std::string& token) const;
  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // One kept token per line; line i holds id i + 4.
  void save(const std::string& path) const;
  std::string to_text() const;
  static Vocab load(const std::string& path);
  static Vocab from_text(const std::string& text);

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  void push(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::size_t min_freq_ = 1;
};

}  // namespace tag
