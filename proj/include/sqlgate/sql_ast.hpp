#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlgate/common.hpp"
#include "sqlgate/grammar.hpp"

namespace sqlgate {

struct Query;

enum class ExprKind {
  Column,     // [qualifier.]name
  Star,       // * or qualifier.*
  Number,
  String,
  Null,
  Negate,     // unary minus
  Arith,      // op in + - * / %
  Compare,    // op in = != <> < <= > >=
  And,        // n-ary, flattened within one grouping level
  Or,         // n-ary, flattened within one grouping level
  Not,
  Group,      // explicit parentheses around a boolean/scalar expression
  Between,    // args: subject, low, high
  InList,     // args: subject, items...
  InQuery,    // args: subject; query
  Like,       // args: subject, pattern
  IsNull,     // args: subject
  Aggregate,  // op: count/sum/avg/min/max
  Function,   // op: lower/upper/trim
  Subquery,   // scalar subquery
};

struct Expr {
  ExprKind kind = ExprKind::Null;
  std::string op;
  std::string qualifier;
  std::string name;
  bool negated = false;   // NOT IN / NOT LIKE / NOT BETWEEN / IS NOT NULL
  bool distinct = false;  // aggregate DISTINCT
  std::vector<Expr> args;
  std::shared_ptr<const Query> query;
  size_t begin = 0;  // source span [begin, end)
  size_t end = 0;
};

struct SelectItem {
  Expr expr;
  std::string alias;
};

struct TableRef {
  std::string name;  // empty for derived tables
  std::string alias;
  std::shared_ptr<const Query> subquery;
  size_t begin = 0;
  /// Name the relation is addressed by inside the query.
  const std::string& visible_name() const { return alias.empty() ? name : alias; }
};

enum class JoinKind { Comma, Join };

struct JoinClause {
  JoinKind kind = JoinKind::Join;
  TableRef table;
  std::optional<Expr> on;
};

struct Select {
  bool distinct = false;
  std::vector<SelectItem> items;
  TableRef from;
  std::vector<JoinClause> joins;
  std::optional<Expr> where;
  std::vector<Expr> group_by;
  std::optional<Expr> having;
};

enum class SetOp { Union, UnionAll, Intersect, Except };
std::string_view set_op_text(SetOp op);

struct OrderItem {
  Expr expr;
  bool descending = false;
};

struct Query {
  std::vector<Select> selects;  // selects.size() == set_ops.size() + 1
  std::vector<SetOp> set_ops;
  std::vector<OrderItem> order_by;
  std::optional<std::string> limit;
};

struct Cte {
  std::string name;
  std::vector<std::string> columns;  // optional explicit column list
  Query body;
  size_t begin = 0;
};

struct Statement {
  std::vector<Cte> ctes;
  Query query;
};

/// Batch parse failure: offset of the offending token plus what would have
/// been accepted there.
class SyntaxError : public Error {
 public:
  SyntaxError(size_t offset, std::vector<std::string> expected, const std::string& message)
      : Error(ErrorCode::Format, message), offset_(offset), expected_(std::move(expected)) {}
  size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  size_t offset_;
  std::vector<std::string> expected_;
};

/// Parses one full statement under `profile`. Throws SyntaxError.
Statement parse_complete(std::string_view sql, Profile profile);

/// Token-level well-formedness check used as the Lex-mode batch oracle:
/// legal token shapes, closed literals, balanced parentheses, at most one
/// trailing `;`, at least one token.
bool lex_complete(std::string_view sql);

std::string to_sql(const Statement& stmt);
std::string to_sql(const Query& q);
std::string to_sql(const Expr& e);

}  // namespace sqlgate
