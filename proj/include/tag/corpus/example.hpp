#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tag/treelang/parsers.hpp"
#include "tag/treelang/tree.hpp"

namespace tag {

struct Example {
  TokenTypeTree tree;
  std::vector<std::string> comment;
};

// One line of corpus JSONL before parsing: either source code with its
// language or an already-built tree document.
struct CorpusRecord {
  std::string code;
  std::string lang;  // "sql" | "lambda"
  std::string tree_json;
  std::string comment;
};

inline constexpr int kCorpusFormatVersion = 1;

TokenTypeTree parse_code(const std::string& code, const std::string& lang,
                         const LambdaTypeTable& table = LambdaTypeTable::defaults());
std::string grammar_for_lang(const std::string& lang);

std::vector<CorpusRecord> read_corpus_jsonl(std::istream& in);
std::vector<CorpusRecord> read_corpus_jsonl(const std::string& path);
void write_record_jsonl(std::ostream& out, const CorpusRecord& record);

// Parses (or decodes) every record, validates trees against `grammar` when
// given (otherwise against the registry grammar named by the tree) and
// tokenizes comments. Errors name the 1-based line.
std::vector<Example> load_examples(const std::vector<CorpusRecord>& records,
                                   const Grammar* grammar = nullptr,
                                   const LambdaTypeTable& table = LambdaTypeTable::defaults());

// Every node token in id order; the source-vocabulary stream of a tree.
std::vector<std::string> source_tokens(const TokenTypeTree& tree);

// Node tokens as they appear in output text when the node is copied.
std::vector<std::string> copy_surface(const TreeNode& node);

}  // namespace tag
