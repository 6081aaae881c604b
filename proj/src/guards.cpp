#include "sqlgate/guards.hpp"

#include "sqlgate/common.hpp"

namespace sqlgate {

std::string_view violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::UnknownTable: return "UnknownTable";
    case ViolationKind::UnknownColumn: return "UnknownColumn";
    case ViolationKind::UnboundAlias: return "UnboundAlias";
    case ViolationKind::AmbiguousColumn: return "AmbiguousColumn";
    case ViolationKind::DuplicateAlias: return "DuplicateAlias";
    case ViolationKind::UnknownCteColumn: return "UnknownCteColumn";
  }
  return "UnknownColumn";
}

const VisibleRelation* Scope::find_relation(std::string_view key) const {
  for (const auto& r : relations)
    if (!r.key.empty() && iequals(r.key, key)) return &r;
  return nullptr;
}

const std::vector<std::string>* Scope::find_cte(std::string_view name) const {
  for (auto it = ctes.rbegin(); it != ctes.rend(); ++it)
    if (iequals(it->first, name)) return &it->second;
  return nullptr;
}

std::optional<RelationDesc> resolve_relation(const Scope& scope, std::string_view name,
                                             const SchemaCatalog& catalog) {
  for (const Scope* s = &scope; s; s = s->parent.get()) {
    if (const auto* cols = s->find_cte(name)) {
      RelationDesc d;
      d.kind = RelationDesc::Kind::Cte;
      d.name = std::string(name);
      d.columns = *cols;
      return d;
    }
  }
  if (const Table* t = catalog.table(name)) {
    RelationDesc d;
    d.kind = RelationDesc::Kind::Base;
    d.name = t->name;
    for (const auto& c : t->columns) d.columns.push_back(c.name);
    return d;
  }
  return std::nullopt;
}

std::optional<GuardViolation> check_relation(const Scope& scope, std::string_view name,
                                             const SchemaCatalog& catalog, size_t location) {
  if (resolve_relation(scope, name, catalog)) return std::nullopt;
  return GuardViolation{ViolationKind::UnknownTable, location, std::string(name)};
}

namespace {

bool has_column(const RelationDesc& r, std::string_view column) {
  for (const auto& c : r.columns)
    if (iequals(c, column)) return true;
  return false;
}

bool has_alias(const Scope& s, std::string_view name) {
  for (const auto& a : s.output_aliases)
    if (iequals(a, name)) return true;
  return false;
}

}  // namespace

std::optional<GuardViolation> check_column(const Scope& scope, std::optional<std::string_view> qualifier,
                                           std::string_view column, const SchemaCatalog& /*catalog*/,
                                           size_t location) {
  if (qualifier) {
    for (const Scope* s = &scope; s; s = s->parent.get()) {
      if (const auto* r = s->find_relation(*qualifier)) {
        if (has_column(r->relation, column)) return std::nullopt;
        return GuardViolation{r->relation.kind == RelationDesc::Kind::Cte ? ViolationKind::UnknownCteColumn
                                                                          : ViolationKind::UnknownColumn,
                              location,
                              std::string(*qualifier) + "." + std::string(column)};
      }
    }
    return GuardViolation{ViolationKind::UnboundAlias, location, std::string(*qualifier)};
  }
  for (const Scope* s = &scope; s; s = s->parent.get()) {
    size_t matches = 0;
    for (const auto& r : s->relations)
      if (has_column(r.relation, column)) ++matches;
    if (matches > 1) return GuardViolation{ViolationKind::AmbiguousColumn, location, std::string(column)};
    if (matches == 1 || has_alias(*s, column)) return std::nullopt;
  }
  return GuardViolation{ViolationKind::UnknownColumn, location, std::string(column)};
}

// ------------------------------------------------------------ batch checker

namespace {

class BatchChecker {
 public:
  explicit BatchChecker(const SchemaCatalog* catalog) : catalog_(catalog) {}

  std::vector<GuardViolation> violations;

  void statement(const Statement& st) {
    auto root = std::make_shared<Scope>();
    for (const auto& cte : st.ctes) {
      if (root->find_cte(cte.name)) add({ViolationKind::DuplicateAlias, cte.begin, cte.name});
      auto cols = query(cte.body, root);
      if (!cte.columns.empty()) cols = cte.columns;
      auto next = std::make_shared<Scope>(*root);
      next->ctes.emplace_back(cte.name, std::move(cols));
      root = std::move(next);
    }
    query(st.query, root);
  }

  /// Checks a query and returns its output column names.
  std::vector<std::string> query(const Query& q, std::shared_ptr<const Scope> parent) {
    std::vector<std::string> first_outputs;
    std::shared_ptr<const Scope> last;
    for (size_t i = 0; i < q.selects.size(); ++i) {
      auto [scope, outputs] = select(q.selects[i], parent);
      if (i == 0) first_outputs = std::move(outputs);
      last = std::move(scope);
    }
    for (const auto& o : q.order_by) expr(o.expr, *last);
    return first_outputs;
  }

  void add(GuardViolation v) { violations.push_back(std::move(v)); }

 private:
  void relation(const TableRef& t, std::shared_ptr<Scope>& scope) {
    VisibleRelation vr;
    if (t.subquery) {
      vr.relation.kind = RelationDesc::Kind::Derived;
      vr.relation.columns = query(*t.subquery, scope_snapshot(scope));
      vr.key = t.alias;
    } else {
      auto d = catalog_ ? resolve_relation(*scope, t.name, *catalog_) : std::nullopt;
      if (!d) {
        add({ViolationKind::UnknownTable, t.begin, t.name});
        return;
      }
      vr.relation = std::move(*d);
      vr.key = t.visible_name();
    }
    if (!vr.key.empty() && scope->find_relation(vr.key)) {
      add({ViolationKind::DuplicateAlias, t.begin, vr.key});
      return;
    }
    scope->relations.push_back(std::move(vr));
  }

  static std::shared_ptr<const Scope> scope_snapshot(const std::shared_ptr<Scope>& s) {
    return std::make_shared<const Scope>(*s);
  }

  std::pair<std::shared_ptr<const Scope>, std::vector<std::string>> select(
      const Select& s, std::shared_ptr<const Scope> parent) {
    auto scope = std::make_shared<Scope>();
    scope->parent = std::move(parent);
    for (const auto& item : s.items)
      if (!item.alias.empty()) scope->output_aliases.push_back(item.alias);
    relation(s.from, scope);
    for (const auto& j : s.joins) {
      relation(j.table, scope);
      if (j.on) expr(*j.on, *scope_snapshot(scope));
    }

    std::vector<std::string> outputs;
    for (size_t i = 0; i < s.items.size(); ++i) {
      const auto& item = s.items[i];
      if (item.expr.kind == ExprKind::Star) {
        if (item.expr.qualifier.empty()) {
          for (const auto& r : scope->relations)
            outputs.insert(outputs.end(), r.relation.columns.begin(), r.relation.columns.end());
        } else if (const auto* r = scope->find_relation(item.expr.qualifier)) {
          outputs.insert(outputs.end(), r->relation.columns.begin(), r->relation.columns.end());
        } else {
          add({ViolationKind::UnboundAlias, item.expr.begin, item.expr.qualifier});
        }
        continue;
      }
      expr(item.expr, *scope);
      if (!item.alias.empty()) {
        outputs.push_back(item.alias);
      } else if (item.expr.kind == ExprKind::Column) {
        outputs.push_back(item.expr.name);
      } else {
        outputs.push_back("_c" + std::to_string(i + 1));
      }
    }
    if (s.where) expr(*s.where, *scope);
    for (const auto& g : s.group_by) expr(g, *scope);
    if (s.having) expr(*s.having, *scope);
    return {scope, outputs};
  }

  void expr(const Expr& e, const Scope& scope) {
    if (e.kind == ExprKind::Column) {
      if (!catalog_) return;
      std::optional<std::string_view> q;
      if (!e.qualifier.empty()) q = e.qualifier;
      if (auto v = check_column(scope, q, e.name, *catalog_, e.begin)) add(std::move(*v));
      return;
    }
    for (const auto& a : e.args) expr(a, scope);
    if (e.query) {
      auto snap = std::make_shared<const Scope>(scope);
      query(*e.query, snap);
    }
  }

  const SchemaCatalog* catalog_;
};

}  // namespace

CteColumnsResult cte_output_columns(const Query& body, const SchemaCatalog* catalog, const Scope* scope) {
  CteColumnsResult out;
  const Select& s = body.selects.front();
  bool has_star = false;
  for (const auto& item : s.items) has_star = has_star || item.expr.kind == ExprKind::Star;
  if (has_star && !catalog) {
    out.violation = GuardViolation{ViolationKind::UnknownCteColumn, s.from.begin, "*"};
    return out;
  }
  if (!has_star) {
    for (size_t i = 0; i < s.items.size(); ++i) {
      const auto& item = s.items[i];
      if (!item.alias.empty()) {
        out.columns.push_back(item.alias);
      } else if (item.expr.kind == ExprKind::Column) {
        out.columns.push_back(item.expr.name);
      } else {
        out.columns.push_back("_c" + std::to_string(i + 1));
      }
    }
    return out;
  }
  BatchChecker checker(catalog);
  auto parent = scope ? std::make_shared<const Scope>(*scope) : std::make_shared<const Scope>();
  out.columns = checker.query(body, parent);
  for (const auto& v : checker.violations) {
    if (v.kind == ViolationKind::UnknownTable || v.kind == ViolationKind::UnboundAlias) {
      out.violation = GuardViolation{ViolationKind::UnknownCteColumn, v.location, v.subject};
      out.columns.clear();
      break;
    }
  }
  return out;
}

std::vector<GuardViolation> check_statement(const Statement& stmt, const SchemaCatalog& catalog) {
  BatchChecker checker(&catalog);
  checker.statement(stmt);
  return std::move(checker.violations);
}

}  // namespace sqlgate
