#include "tag/corpus/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "tag/error.hpp"

namespace tag {

Vocab::Vocab() {
  for (const char* r : {"<pad>", "<bos>", "<eos>", "<unk>"}) push(r);
}

void Vocab::push(const std::string& token) {
  ids_.emplace(token, tokens_.size());
  tokens_.push_back(token);
}

Vocab Vocab::build(const std::vector<std::vector<std::string>>& streams, std::size_t min_freq) {
  if (min_freq == 0) throw ConfigError("min_freq must be >= 1");
  std::map<std::string, std::size_t> freq;
  for (const auto& s : streams)
    for (const auto& t : s) ++freq[t];
  std::vector<std::pair<std::string, std::size_t>> kept;
  Vocab v;
  for (const auto& [tok, n] : freq) {
    if (n >= min_freq && !v.ids_.count(tok)) kept.emplace_back(tok, n);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [tok, _] : kept) v.push(tok);
  v.min_freq_ = min_freq;
  return v;
}

bool Vocab::contains(const std::string& token) const {
  auto it = ids_.find(token);
  return it != ids_.end() && it->second >= kReserved;
}

std::size_t Vocab::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

std::string Vocab::to_text() const {
  std::string out;
  for (std::size_t i = kReserved; i < tokens_.size(); ++i) {
    out += tokens_[i];
    out.push_back('\n');
  }
  return out;
}

void Vocab::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write vocabulary: " + path);
  out << to_text();
}

Vocab Vocab::from_text(const std::string& text) {
  Vocab v;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_of(" \t\r") != std::string::npos) {
      throw ValidationError("vocabulary line " + std::to_string(lineno) + " is not a single token");
    }
    if (v.ids_.count(line)) {
      throw ValidationError("vocabulary line " + std::to_string(lineno) + " repeats '" + line + "'");
    }
    v.push(line);
  }
  return v;
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open vocabulary: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

}  // namespace tag
