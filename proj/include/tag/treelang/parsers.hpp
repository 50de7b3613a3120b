#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "tag/treelang/tree.hpp"

namespace tag {

// WikiSQL-style subset:
//   SELECT [agg_op(] column [)] FROM table [WHERE cond (AND cond)*]
//   cond := column cmp_op value ; value := 'quoted' | "quoted" | number
// Tree shape: stmt[SELECT] with children (agg_op[AGG] -> column_name | column_name)
// followed by one cond_expr[WHERE|AND] per condition holding column_name,
// cmp_op and string children. The table name is not a node.
TokenTypeTree parse_sql(std::string_view text);

// Head -> node type mapping used for lambda-calculus applications, plus the
// atoms treated as class/type symbols. Loaded from data so predicates can be
// added without a rebuild.
struct LambdaTypeTable {
  std::map<std::string, std::string> heads;
  std::set<std::string> var_types;
  std::string default_head_type = "pred";

  static const LambdaTypeTable& defaults();
  // Lines "<head> <type>" or "var_type <atom>"; '#' starts a comment.
  static LambdaTypeTable parse(std::string_view text);
  static LambdaTypeTable load(const std::string& path);
};

// ATIS-style s-expressions. An application ( head args... ) becomes a node
// typed by the head table with token [head] and the arguments as children.
// Atoms: $k -> var, numerals -> num, class atoms -> var_type, everything else
// (ci0, ap0, dallas:ci, ...) -> ent.
TokenTypeTree parse_lambda(std::string_view text,
                           const LambdaTypeTable& table = LambdaTypeTable::defaults());

}  // namespace tag
