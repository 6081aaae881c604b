#include "sqlgate/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "sqlgate/sqlite_db.hpp"

namespace sqlgate {

std::string_view em_verdict_name(EmVerdict v) {
  switch (v) {
    case EmVerdict::Match: return "match";
    case EmVerdict::NoMatch: return "no_match";
    case EmVerdict::GoldUnparseable: return "gold_unparseable";
    case EmVerdict::PredUnparseable: return "pred_unparseable";
  }
  return "no_match";
}

std::string_view ex_verdict_name(ExVerdict v) {
  switch (v) {
    case ExVerdict::Match: return "match";
    case ExVerdict::NoMatch: return "no_match";
    case ExVerdict::GoldExecError: return "gold_exec_error";
    case ExVerdict::PredExecError: return "pred_exec_error";
  }
  return "no_match";
}

// ---------------------------------------------------------- canonical form

namespace {

struct Rel {
  std::string key;  // visible name, lowercase
  std::string id;   // canonical name
  std::vector<std::string> columns;  // lowercase; empty when unknown
};

struct Env {
  const Env* parent = nullptr;
  std::vector<Rel> rels;
  std::vector<std::string> output_aliases;
};

struct CteInfo {
  std::string id;
  std::vector<std::string> columns;
};

class Canon {
 public:
  Canon(const SchemaCatalog* catalog, bool values) : catalog_(catalog), values_(values) {}

  std::string statement(const Statement& st) {
    std::string out;
    for (const auto& cte : st.ctes) {
      std::vector<std::string> cols;
      std::string body = query(cte.body, nullptr, &cols);
      if (!cte.columns.empty()) {
        cols.clear();
        for (const auto& c : cte.columns) cols.push_back(to_lower(c));
      }
      CteInfo info{"cte" + std::to_string(ctes_.size() + 1), cols};
      out += "with " + info.id + "(" + join(cols, ",") + ")=" + body + ";";
      ctes_[to_lower(cte.name)] = std::move(info);
    }
    return out + query(st.query, nullptr, nullptr);
  }

 private:
  static std::string join(const std::vector<std::string>& v, std::string_view sep) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? std::string(sep) : "") + v[i];
    return s;
  }

  static std::string sorted_join(std::vector<std::string> v, std::string_view sep) {
    std::sort(v.begin(), v.end());
    return join(v, sep);
  }

  std::string query(const Query& q, const Env* parent, std::vector<std::string>* outputs) {
    std::string s = "q[";
    const Env* last = nullptr;
    std::vector<std::unique_ptr<Env>> envs;
    for (size_t i = 0; i < q.selects.size(); ++i) {
      if (i) s += " " + std::string(set_op_text(q.set_ops[i - 1])) + " ";
      envs.push_back(std::make_unique<Env>());
      envs.back()->parent = parent;
      s += select(q.selects[i], *envs.back(), i == 0 ? outputs : nullptr);
      last = envs.back().get();
    }
    if (!q.order_by.empty()) {
      s += " order(";
      for (size_t i = 0; i < q.order_by.size(); ++i)
        s += (i ? "," : "") + expr(q.order_by[i].expr, *last) + (q.order_by[i].descending ? " desc" : " asc");
      s += ")";
    }
    if (q.limit) s += " limit " + (values_ ? *q.limit : std::string("?"));
    return s + "]";
  }

  void add_relation(const TableRef& t, Env& env, std::vector<std::string>& rel_descs) {
    Rel r;
    r.key = to_lower(t.visible_name());
    std::string base;
    if (t.subquery) {
      std::vector<std::string> cols;
      base = "derived" + query(*t.subquery, env.parent, &cols);
      r.columns = std::move(cols);
    } else if (auto it = ctes_.find(to_lower(t.name)); it != ctes_.end()) {
      base = it->second.id;
      r.columns = it->second.columns;
    } else {
      base = to_lower(t.name);
      if (catalog_) {
        if (const Table* tb = catalog_->table(t.name))
          for (const auto& c : tb->columns) r.columns.push_back(to_lower(c.name));
      }
    }
    size_t seen = 0;
    for (const auto& other : env.rels)
      if (other.id == base || other.id.rfind(base + "#", 0) == 0) ++seen;
    r.id = seen ? base + "#" + std::to_string(seen + 1) : base;
    rel_descs.push_back(r.id);
    env.rels.push_back(std::move(r));
  }

  std::string select(const Select& s, Env& env, std::vector<std::string>* outputs) {
    for (const auto& item : s.items)
      if (!item.alias.empty()) env.output_aliases.push_back(to_lower(item.alias));
    std::vector<std::string> rels;
    add_relation(s.from, env, rels);
    for (const auto& j : s.joins) add_relation(j.table, env, rels);
    std::vector<std::string> conds;
    for (const auto& j : s.joins)
      if (j.on) collect_and(*j.on, env, conds);

    std::string out = "s[";
    if (s.distinct) out += "distinct ";
    std::vector<std::string> items;
    for (size_t i = 0; i < s.items.size(); ++i) {
      const auto& item = s.items[i];
      items.push_back(expr(item.expr, env));
      if (!outputs) continue;
      if (item.expr.kind == ExprKind::Star) {
        for (const auto& r : env.rels)
          if (item.expr.qualifier.empty() || iequals(r.key, item.expr.qualifier))
            outputs->insert(outputs->end(), r.columns.begin(), r.columns.end());
      } else if (!item.alias.empty()) {
        outputs->push_back(to_lower(item.alias));
      } else if (item.expr.kind == ExprKind::Column) {
        outputs->push_back(to_lower(item.expr.name));
      } else {
        outputs->push_back("_c" + std::to_string(i + 1));
      }
    }
    out += join(items, ",");
    out += " from{" + sorted_join(rels, ",") + "}";
    if (!conds.empty()) out += " on{" + sorted_join(conds, ",") + "}";
    if (s.where) out += " where " + expr(*s.where, env);
    if (!s.group_by.empty()) {
      std::vector<std::string> g;
      for (const auto& e : s.group_by) g.push_back(expr(e, env));
      out += " group{" + sorted_join(g, ",") + "}";
    }
    if (s.having) out += " having " + expr(*s.having, env);
    return out + "]";
  }

  static const Expr& strip(const Expr& e) {
    const Expr* p = &e;
    while (p->kind == ExprKind::Group) p = &p->args[0];
    return *p;
  }

  void collect_and(const Expr& e, const Env& env, std::vector<std::string>& out) {
    const Expr& s = strip(e);
    if (s.kind == ExprKind::And) {
      for (const auto& a : s.args) collect_and(a, env, out);
    } else {
      out.push_back(expr(s, env));
    }
  }

  void collect(const Expr& e, ExprKind kind, const Env& env, std::vector<std::string>& out) {
    const Expr& s = strip(e);
    if (s.kind == kind) {
      for (const auto& a : s.args) collect(a, kind, env, out);
    } else {
      out.push_back(expr(s, env));
    }
  }

  std::string column(const Expr& e, const Env& env) {
    const std::string name = to_lower(e.name);
    if (!e.qualifier.empty()) {
      for (const Env* p = &env; p; p = p->parent)
        for (const auto& r : p->rels)
          if (r.key == to_lower(e.qualifier)) return r.id + "." + name;
      return to_lower(e.qualifier) + "." + name;
    }
    for (const Env* p = &env; p; p = p->parent) {
      const Rel* hit = nullptr;
      size_t hits = 0;
      for (const auto& r : p->rels) {
        if (std::find(r.columns.begin(), r.columns.end(), name) != r.columns.end()) {
          hit = &r;
          ++hits;
        }
      }
      if (hits == 1) return hit->id + "." + name;
      if (hits > 1) return name;
      if (std::find(p->output_aliases.begin(), p->output_aliases.end(), name) != p->output_aliases.end())
        return "@" + name;
      // Without schema information a single relation owns every column.
      if (p->rels.size() == 1 && p->rels[0].columns.empty()) return p->rels[0].id + "." + name;
    }
    return name;
  }

  static std::string flip(const std::string& op) {
    if (op == "<") return ">";
    if (op == ">") return "<";
    if (op == "<=") return ">=";
    if (op == ">=") return "<=";
    return op;
  }

  std::string literal(const std::string& text) { return values_ ? text : "?"; }

  std::string args(const std::vector<Expr>& a, const Env& env, size_t from = 0) {
    std::vector<std::string> v;
    for (size_t i = from; i < a.size(); ++i) v.push_back(expr(a[i], env));
    return join(v, ",");
  }

  std::string expr(const Expr& e, const Env& env) {
    const std::string neg = e.negated ? "not " : "";
    switch (e.kind) {
      case ExprKind::Column: return column(e, env);
      case ExprKind::Star: {
        if (e.qualifier.empty()) return "*";
        Expr q;
        q.qualifier = e.qualifier;
        q.name = "*";
        return column(q, env);
      }
      case ExprKind::Number: {
        if (!values_) return "?";
        // 1.50 and 1.5 are the same literal
        std::string t = e.name.empty() ? e.op : e.name;
        if (t.find('.') != std::string::npos) {
          while (!t.empty() && t.back() == '0') t.pop_back();
          if (!t.empty() && t.back() == '.') t.pop_back();
        }
        return t;
      }
      case ExprKind::String: return values_ ? "'" + (e.name.empty() ? e.op : e.name) + "'" : "?";
      case ExprKind::Null: return "null";
      case ExprKind::Negate: return "neg(" + expr(e.args[0], env) + ")";
      case ExprKind::Arith: return "(" + expr(e.args[0], env) + e.op + expr(e.args[1], env) + ")";
      case ExprKind::Compare: {
        std::string op = e.op == "<>" ? "!=" : e.op == "==" ? "=" : e.op;
        std::string a = expr(e.args[0], env), b = expr(e.args[1], env);
        if (b < a) {
          std::swap(a, b);
          op = flip(op);
        }
        return "cmp(" + a + op + b + ")";
      }
      case ExprKind::And:
      case ExprKind::Or: {
        std::vector<std::string> v;
        for (const auto& a : e.args) collect(a, e.kind, env, v);
        return std::string(e.kind == ExprKind::And ? "and" : "or") + "{" + sorted_join(v, ",") + "}";
      }
      case ExprKind::Not: {
        const Expr& inner = strip(e.args[0]);
        if (inner.kind == ExprKind::Not) return expr(inner.args[0], env);
        return "not(" + expr(inner, env) + ")";
      }
      case ExprKind::Group: return expr(e.args[0], env);
      case ExprKind::Between:
        return neg + "between(" + args(e.args, env) + ")";
      case ExprKind::InList: {
        std::vector<std::string> items;
        for (size_t i = 1; i < e.args.size(); ++i) items.push_back(expr(e.args[i], env));
        return neg + "in(" + expr(e.args[0], env) + ";{" + sorted_join(items, ",") + "})";
      }
      case ExprKind::InQuery:
        return neg + "inq(" + expr(e.args[0], env) + ";" + query(*e.query, &env, nullptr) + ")";
      case ExprKind::Like: return neg + "like(" + args(e.args, env) + ")";
      case ExprKind::IsNull: return neg + "isnull(" + expr(e.args[0], env) + ")";
      case ExprKind::Aggregate:
        return to_lower(e.op) + "(" + (e.distinct ? "distinct " : "") + args(e.args, env) + ")";
      case ExprKind::Function: return to_lower(e.op) + "(" + args(e.args, env) + ")";
      case ExprKind::Subquery: return "(" + query(*e.query, &env, nullptr) + ")";
    }
    return "?";
  }

  const SchemaCatalog* catalog_;
  bool values_;
  std::map<std::string, CteInfo> ctes_;
};

}  // namespace

std::string canonicalize(const Statement& stmt, const SchemaCatalog* catalog, bool compare_values) {
  return Canon(catalog, compare_values).statement(stmt);
}

std::optional<std::string> canonical_form(std::string_view sql, const SchemaCatalog* catalog, bool compare_values) {
  try {
    return canonicalize(parse_complete(sql, Profile::Extended), catalog, compare_values);
  } catch (const Error&) {
    return std::nullopt;
  }
}

EmVerdict exact_match(std::string_view gold, std::string_view pred, const SchemaCatalog* catalog,
                      bool compare_values) {
  auto g = canonical_form(gold, catalog, compare_values);
  if (!g) return EmVerdict::GoldUnparseable;
  auto p = canonical_form(pred, catalog, compare_values);
  if (!p) return EmVerdict::PredUnparseable;
  return *g == *p ? EmVerdict::Match : EmVerdict::NoMatch;
}

// ----------------------------------------------------------- execution

namespace {

constexpr double kTolerance = 1e-6;

int rank(const db::Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return 0;
  if (std::holds_alternative<std::string>(c)) return 2;
  return 1;
}

double num(const db::Cell& c) {
  if (auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  return std::get<double>(c);
}

bool cell_less(const db::Cell& a, const db::Cell& b) {
  if (rank(a) != rank(b)) return rank(a) < rank(b);
  if (rank(a) == 1) return num(a) < num(b);
  if (rank(a) == 2) return std::get<std::string>(a) < std::get<std::string>(b);
  return false;
}

bool cell_equal(const db::Cell& a, const db::Cell& b) {
  if (rank(a) != rank(b)) return false;
  if (rank(a) == 1) return std::fabs(num(a) - num(b)) <= kTolerance;
  if (rank(a) == 2) return std::get<std::string>(a) == std::get<std::string>(b);
  return true;
}

bool rows_equal(const db::Row& a, const db::Row& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!cell_equal(a[i], b[i])) return false;
  return true;
}

bool ordered_by(std::string_view sql) {
  try {
    return !parse_complete(sql, Profile::Extended).query.order_by.empty();
  } catch (const Error&) {
    return to_lower(sql).find("order by") != std::string::npos;
  }
}

ExVerdict compare_results(std::string_view gold, std::string_view pred, db::Database& db,
                          std::chrono::milliseconds timeout) {
  db::ResultSet g, p;
  try {
    g = db.query(std::string(gold), timeout);
  } catch (const Error&) {
    return ExVerdict::GoldExecError;
  }
  try {
    p = db.query(std::string(pred), timeout);
  } catch (const Error&) {
    return ExVerdict::PredExecError;
  }
  if (g.column_count != p.column_count || g.rows.size() != p.rows.size()) return ExVerdict::NoMatch;
  if (!ordered_by(gold)) {
    auto row_less = [](const db::Row& a, const db::Row& b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), cell_less);
    };
    std::sort(g.rows.begin(), g.rows.end(), row_less);
    std::sort(p.rows.begin(), p.rows.end(), row_less);
  }
  for (size_t i = 0; i < g.rows.size(); ++i)
    if (!rows_equal(g.rows[i], p.rows[i])) return ExVerdict::NoMatch;
  return ExVerdict::Match;
}

}  // namespace

ExVerdict execution_accuracy(std::string_view gold, std::string_view pred, const std::string& db_path,
                             std::chrono::milliseconds timeout) {
  auto db = db::Database::open_readonly(db_path);
  return compare_results(gold, pred, db, timeout);
}

// -------------------------------------------------------------- corpus

std::optional<double> MetricTotals::percent() const {
  if (scored == 0) return std::nullopt;
  return std::round(1000.0 * static_cast<double>(matched) / static_cast<double>(scored)) / 10.0;
}

CorpusReport evaluate_corpus(const std::vector<EvalInput>& inputs, const SchemaCatalog* catalog,
                             const std::string& db_path, const EvalOptions& opts) {
  CorpusReport report;
  report.records.resize(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) {
    auto& r = report.records[i];
    r.question = inputs[i].question;
    r.gold_sql = inputs[i].gold;
    r.pred_sql = inputs[i].pred;
    if (opts.em) r.em = exact_match(r.gold_sql, r.pred_sql, catalog, opts.compare_values);
  }
  if (opts.ex && !inputs.empty()) {
    // Fail early (IoError) when the database cannot be opened at all.
    db::Database::open_readonly(db_path);
    const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(inputs.size())));
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      auto db = db::Database::open_readonly(db_path);
      for (size_t i; (i = next++) < inputs.size();)
        report.records[i].ex = compare_results(inputs[i].gold, inputs[i].pred, db, opts.timeout);
    };
    if (jobs == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
  }
  if (opts.em) {
    MetricTotals t;
    for (const auto& r : report.records) {
      if (*r.em == EmVerdict::GoldUnparseable) {
        ++t.excluded;
        continue;
      }
      ++t.scored;
      if (*r.em == EmVerdict::Match) ++t.matched;
    }
    report.em = t;
  }
  if (opts.ex) {
    MetricTotals t;
    for (const auto& r : report.records) {
      if (!r.ex) continue;
      if (*r.ex == ExVerdict::GoldExecError) {
        ++t.excluded;
        continue;
      }
      ++t.scored;
      if (*r.ex == ExVerdict::Match) ++t.matched;
    }
    report.ex = t;
  }
  return report;
}

std::string format_percent(double p) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << p;
  return os.str();
}

std::string report_json(const CorpusReport& r) {
  using nlohmann::json;
  json out;
  out["empty"] = r.empty();
  out["count"] = r.records.size();
  auto totals = [](const MetricTotals& t) {
    json j;
    j["scored"] = t.scored;
    j["matched"] = t.matched;
    j["excluded"] = t.excluded;
    if (auto p = t.percent()) j["percent"] = *p;
    else j["percent"] = nullptr;
    return j;
  };
  if (r.em) out["em"] = totals(*r.em);
  if (r.ex) out["ex"] = totals(*r.ex);
  json recs = json::array();
  for (const auto& rec : r.records) {
    json j{{"question", rec.question}, {"gold", rec.gold_sql}, {"pred", rec.pred_sql}};
    if (rec.em) j["em"] = em_verdict_name(*rec.em);
    if (rec.ex) j["ex"] = ex_verdict_name(*rec.ex);
    recs.push_back(std::move(j));
  }
  out["records"] = std::move(recs);
  return out.dump();
}

std::string report_table(const CorpusReport& r, std::string_view label) {
  auto cell = [](const std::optional<MetricTotals>& t) -> std::string {
    if (!t) return "";
    auto p = t->percent();
    return p ? format_percent(*p) : "--";
  };
  std::ostringstream os;
  auto row = [&](std::string_view a, std::string_view b, std::string_view c, std::string_view d) {
    os << a;
    for (size_t i = a.size(); i < 24; ++i) os << ' ';
    os << b;
    for (size_t i = b.size(); i < 8; ++i) os << ' ';
    os << c;
    for (size_t i = c.size(); i < 8; ++i) os << ' ';
    os << d << '\n';
  };
  row("corpus", "n", r.em ? "EM (%)" : "", r.ex ? "EX (%)" : "");
  row(label, std::to_string(r.records.size()), cell(r.em), cell(r.ex));
  if (r.em && r.em->excluded) os << "note: " << r.em->excluded << " gold queries unparseable, left out of EM\n";
  if (r.ex && r.ex->excluded) os << "note: " << r.ex->excluded << " gold queries failed to execute, left out of EX\n";
  return os.str();
}

}  // namespace sqlgate
