#include "tag/corpus/example.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "tag/corpus/tokenizer.hpp"
#include "tag/error.hpp"
#include "tag/treelang/tree_json.hpp"

namespace tag {

std::string grammar_for_lang(const std::string& lang) {
  if (lang == "sql") return "wikisql";
  if (lang == "lambda") return "atis";
  throw ValidationError("unknown code language '" + lang + "' (expected sql or lambda)");
}

TokenTypeTree parse_code(const std::string& code, const std::string& lang,
                         const LambdaTypeTable& table) {
  if (lang == "sql") return parse_sql(code);
  if (lang == "lambda") return parse_lambda(code, table);
  throw ValidationError("unknown code language '" + lang + "' (expected sql or lambda)");
}

std::vector<CorpusRecord> read_corpus_jsonl(std::istream& in) {
  std::vector<CorpusRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "corpus line " + std::to_string(lineno);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(where + ": " + e.what());
    }
    if (!doc.is_object()) throw ValidationError(where + ": not a JSON object");
    if (auto v = doc.find("format_version"); v != doc.end() && *v != kCorpusFormatVersion) {
      throw ValidationError(where + ": unsupported format version " + v->dump());
    }
    CorpusRecord r;
    auto comment = doc.find("comment");
    if (comment == doc.end() || !comment->is_string()) {
      throw ValidationError(where + ": missing string field 'comment'");
    }
    r.comment = comment->get<std::string>();
    if (auto t = doc.find("tree"); t != doc.end()) {
      r.tree_json = t->dump();
    } else {
      auto code = doc.find("code");
      auto lang = doc.find("lang");
      if (code == doc.end() || !code->is_string() || lang == doc.end() || !lang->is_string()) {
        throw ValidationError(where + ": need either 'tree' or string fields 'code' and 'lang'");
      }
      r.code = code->get<std::string>();
      r.lang = lang->get<std::string>();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CorpusRecord> read_corpus_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus: " + path);
  return read_corpus_jsonl(in);
}

void write_record_jsonl(std::ostream& out, const CorpusRecord& record) {
  nlohmann::ordered_json doc;
  doc["format_version"] = kCorpusFormatVersion;
  if (!record.tree_json.empty()) {
    doc["tree"] = nlohmann::ordered_json::parse(record.tree_json);
  } else {
    doc["code"] = record.code;
    doc["lang"] = record.lang;
  }
  doc["comment"] = record.comment;
  out << doc.dump() << '\n';
}

std::vector<Example> load_examples(const std::vector<CorpusRecord>& records,
                                   const Grammar* grammar, const LambdaTypeTable& table) {
  std::vector<Example> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const CorpusRecord& r = records[i];
    try {
      Example ex;
      if (!r.tree_json.empty()) {
        ex.tree = grammar ? tree_from_json(r.tree_json, *grammar) : tree_from_json(r.tree_json);
      } else {
        ex.tree = parse_code(r.code, r.lang, table);
        validate(ex.tree, grammar ? *grammar : grammar_registry(grammar_for_lang(r.lang)));
      }
      ex.comment = tokenize_comment(r.comment);
      out.push_back(std::move(ex));
    } catch (const ParseError& e) {
      throw ValidationError("record " + std::to_string(i + 1) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::string> source_tokens(const TokenTypeTree& tree) {
  std::vector<std::string> out;
  for (const auto& n : tree.nodes()) out.insert(out.end(), n.tokens.begin(), n.tokens.end());
  return out;
}

std::vector<std::string> copy_surface(const TreeNode& node) {
  if (node.tokens.empty()) return {};
  const std::string joined = join_tokens(node.tokens);
  if (joined.find_first_not_of(" \t\r\n") == std::string::npos) return {};
  return tokenize_comment(joined);
}

}  // namespace tag
