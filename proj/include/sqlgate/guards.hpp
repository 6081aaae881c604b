#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlgate/catalog.hpp"
#include "sqlgate/sql_ast.hpp"

namespace sqlgate {

enum class ViolationKind {
  UnknownTable,
  UnknownColumn,
  UnboundAlias,
  AmbiguousColumn,
  DuplicateAlias,
  UnknownCteColumn,
};

std::string_view violation_kind_name(ViolationKind k);

struct GuardViolation {
  ViolationKind kind = ViolationKind::UnknownColumn;
  size_t location = 0;
  std::string subject;
  bool operator==(const GuardViolation&) const = default;
};

struct RelationDesc {
  enum class Kind { Base, Cte, Derived };
  Kind kind = Kind::Base;
  std::string name;                  // base table or CTE name; empty for derived
  std::vector<std::string> columns;  // output columns (resolved for all kinds)
};

struct VisibleRelation {
  std::string key;  // alias, or the relation's own name; empty for unnamed derived tables
  RelationDesc relation;
};

/// Names visible at one nesting level. `parent` links to the enclosing
/// query's scope (correlated references) and, at the top, to the statement
/// scope holding CTE definitions.
struct Scope {
  std::vector<VisibleRelation> relations;
  std::vector<std::pair<std::string, std::vector<std::string>>> ctes;
  std::vector<std::string> output_aliases;
  std::shared_ptr<const Scope> parent;

  const VisibleRelation* find_relation(std::string_view key) const;
  const std::vector<std::string>* find_cte(std::string_view name) const;
};

/// Resolves a FROM-clause name: CTEs (innermost first) shadow base tables.
std::optional<RelationDesc> resolve_relation(const Scope& scope, std::string_view name,
                                             const SchemaCatalog& catalog);

std::optional<GuardViolation> check_relation(const Scope& scope, std::string_view name,
                                             const SchemaCatalog& catalog, size_t location = 0);

std::optional<GuardViolation> check_column(const Scope& scope, std::optional<std::string_view> qualifier,
                                           std::string_view column, const SchemaCatalog& catalog,
                                           size_t location = 0);

/// Output column names of a query body: alias, else the bare column name,
/// else `_cN` (1-based position). Star items expand through `catalog` and the
/// CTEs visible in `scope`; without them a star raises UnknownCteColumn.
struct CteColumnsResult {
  std::vector<std::string> columns;
  std::optional<GuardViolation> violation;
};
CteColumnsResult cte_output_columns(const Query& body, const SchemaCatalog* catalog = nullptr,
                                    const Scope* scope = nullptr);

/// Batch guard check of a parsed statement; empty when schema-consistent.
std::vector<GuardViolation> check_statement(const Statement& stmt, const SchemaCatalog& catalog);

}  // namespace sqlgate
