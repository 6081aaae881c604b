#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

#include "grammar_run.hpp"
#include "sqlgate/sql_ast.hpp"
#include "sqlgate/token.hpp"

namespace sqlgate {

std::string_view set_op_text(SetOp op) {
  switch (op) {
    case SetOp::Union: return "UNION";
    case SetOp::UnionAll: return "UNION ALL";
    case SetOp::Intersect: return "INTERSECT";
    case SetOp::Except: return "EXCEPT";
  }
  return "UNION";
}


namespace detail {

namespace {

bool word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

[[noreturn]] void lex_fail(size_t offset, const std::string& what) {
  throw SyntaxError(offset, {}, what + " at offset " + std::to_string(offset));
}

}  // namespace

std::vector<Token> scan(std::string_view s) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.offset = i;
    if (word_start(c)) {
      size_t j = i;
      while (j < s.size() && word_char(s[j])) ++j;
      std::string_view w = s.substr(i, j - i);
      if (auto kw = keyword_from(w)) {
        t.kind = TokenKind::Keyword;
        t.keyword = *kw;
        t.text = keyword_text(*kw);
      } else {
        t.kind = TokenKind::Identifier;
        t.text = std::string(w);
      }
      i = j;
    } else if (digit(c)) {
      size_t j = i;
      while (j < s.size() && digit(s[j])) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && digit(s[j])) ++j;
      }
      if (j < s.size() && word_char(s[j])) lex_fail(j, "malformed number");
      t.kind = TokenKind::Number;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (c == '\'' || c == '"') {
      const char q = c;
      size_t j = i + 1;
      std::string body;
      bool closed = false;
      while (j < s.size()) {
        if (s[j] == q) {
          if (j + 1 < s.size() && s[j + 1] == q) {
            body.push_back(q);
            j += 2;
            continue;
          }
          closed = true;
          ++j;
          break;
        }
        body.push_back(s[j++]);
      }
      if (!closed) lex_fail(i, "unterminated literal");
      if (q == '"') {
        if (body.empty()) lex_fail(i, "empty quoted identifier");
        t.kind = TokenKind::Identifier;
        t.quoted = true;
      } else {
        t.kind = TokenKind::String;
      }
      t.text = std::move(body);
      i = j;
    } else {
      t.kind = TokenKind::Punct;
      auto next = i + 1 < s.size() ? s[i + 1] : '\0';
      switch (c) {
        case '(': case ')': case ',': case '.': case ';': case '*': case '+': case '-':
        case '/': case '%': case '=':
          t.text = std::string(1, c);
          break;
        case '<':
          t.text = (next == '=' || next == '>') ? std::string{c, next} : "<";
          break;
        case '>':
          t.text = next == '=' ? ">=" : ">";
          break;
        case '!':
          if (next != '=') lex_fail(i, "stray '!'");
          t.text = "!=";
          break;
        default:
          lex_fail(i, std::string("illegal character '") + c + "'");
      }
      i += t.text.size();
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = TokenKind::End;
  end.offset = s.size();
  out.push_back(end);
  return out;
}

}  // namespace detail

namespace {

using detail::scan;

bool word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::End: return "end of input";
    case TokenKind::String: return "string literal";
    case TokenKind::Number: return "number " + t.text;
    case TokenKind::Identifier: return "identifier " + t.text;
    default: return "'" + t.text + "'";
  }
}

struct GuardFailure {
  GuardViolation violation;
  bool fixable = false;  // more input could still repair it
};

// Items: reading the select list, FROM not seen yet. From: reading FROM
// items. Body: FROM closed.
enum class Phase { Items, From, Body };

struct RunScope {
  struct Deferred {
    std::string qualifier;
    std::string name;
    size_t location = 0;
  };

  RunScope* parent = nullptr;
  Phase phase = Phase::Body;
  std::vector<VisibleRelation> relations;
  std::vector<std::pair<std::string, std::vector<std::string>>> ctes;
  std::vector<std::string> output_aliases;
  std::vector<Deferred> deferred;

  const VisibleRelation* find(std::string_view key) const {
    for (const auto& r : relations)
      if (!r.key.empty() && iequals(r.key, key)) return &r;
    return nullptr;
  }
};

bool contains(const std::vector<std::string>& names, std::string_view n) {
  for (const auto& x : names)
    if (iequals(x, n)) return true;
  return false;
}

bool any_prefixed(const std::vector<std::string>& names, std::string_view p) {
  for (const auto& x : names)
    if (istarts_with(x, p)) return true;
  return false;
}

std::shared_ptr<const Scope> export_scope(const RunScope* s) {
  if (!s) return nullptr;
  auto out = std::make_shared<Scope>();
  out->relations = s->relations;
  out->ctes = s->ctes;
  out->output_aliases = s->output_aliases;
  out->parent = export_scope(s->parent);
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, Profile profile, const SchemaCatalog* catalog = nullptr)
      : toks_(std::move(toks)), profile_(profile), catalog_(catalog) {}

  Statement statement() {
    Statement st;
    if (guards()) cur_ = push_scope(Phase::Body);
    if (peek().is(Keyword::With)) {
      if (profile_ != Profile::Extended) fail({"SELECT"});
      next();
      do {
        st.ctes.push_back(cte());
      } while (accept_punct(","));
    }
    st.query = query();
    accept_punct(";");
    if (peek().kind != TokenKind::End) fail({"end of input"});
    return st;
  }

  bool failed_at_end() const { return failed_at_end_; }
  std::shared_ptr<const Scope> snapshot() const { return export_scope(cur_); }

 private:
  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_end() const { return peek().kind == TokenKind::End; }
  size_t prev_end() const {
    if (pos_ == 0) return 0;
    const Token& t = toks_[pos_ - 1];
    return t.offset + raw_length(t);
  }
  static size_t raw_length(const Token& t) {
    auto count = [&](char q) { return static_cast<size_t>(std::count(t.text.begin(), t.text.end(), q)); };
    switch (t.kind) {
      case TokenKind::String: return t.text.size() + 2 + count('\'');
      case TokenKind::Identifier: return t.quoted ? t.text.size() + 2 + count('"') : t.text.size();
      default: return t.text.size();
    }
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    const Token& t = peek();
    failed_at_end_ = t.kind == TokenKind::End;
    std::string msg = "unexpected " + describe(t) + " at offset " + std::to_string(t.offset);
    if (!expected.empty()) {
      msg += "; expected ";
      for (size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : "") + expected[i];
    }
    throw SyntaxError(t.offset, std::move(expected), msg);
  }

  bool accept_kw(Keyword k) {
    if (!peek().is(k)) return false;
    next();
    return true;
  }
  void expect_kw(Keyword k) {
    if (!accept_kw(k)) fail({std::string(keyword_text(k))});
  }
  bool accept_punct(std::string_view p) {
    if (!peek().is_punct(p)) return false;
    next();
    return true;
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail({"'" + std::string(p) + "'"});
  }
  const Token& identifier_token() {
    if (peek().kind != TokenKind::Identifier) fail({"identifier"});
    return next();
  }
  std::string identifier() { return identifier_token().text; }

  // ---------------------------------------------------------------- guards

  bool guards() const { return catalog_ != nullptr; }

  [[noreturn]] static void violate(ViolationKind k, size_t loc, std::string subject, bool fixable) {
    throw GuardFailure{GuardViolation{k, loc, std::move(subject)}, fixable};
  }

  RunScope* push_scope(Phase phase) {
    scopes_.emplace_back();
    RunScope* s = &scopes_.back();
    s->parent = cur_;
    s->phase = phase;
    return s;
  }

  std::optional<RelationDesc> lookup_relation(std::string_view name) const {
    for (const RunScope* s = cur_; s; s = s->parent) {
      for (auto it = s->ctes.rbegin(); it != s->ctes.rend(); ++it) {
        if (iequals(it->first, name)) return RelationDesc{RelationDesc::Kind::Cte, it->first, it->second};
      }
    }
    if (const Table* t = catalog_->table(name)) {
      RelationDesc d{RelationDesc::Kind::Base, t->name, {}};
      for (const auto& c : t->columns) d.columns.push_back(c.name);
      return d;
    }
    return std::nullopt;
  }

  bool relation_prefixed(std::string_view p) const {
    for (const RunScope* s = cur_; s; s = s->parent)
      for (const auto& c : s->ctes)
        if (istarts_with(c.first, p)) return true;
    for (const auto& t : catalog_->tables())
      if (istarts_with(t.name, p)) return true;
    return false;
  }

  /// Could `name`, already complete, still be followed by `.` or `(`?
  bool could_continue(std::string_view name) const {
    if (profile_ == Profile::Extended && is_string_function(name)) return true;
    for (const RunScope* s = cur_; s; s = s->parent)
      if (s->find(name)) return true;
    return false;
  }

  /// Resolves a column reference from `from` outwards. A select list whose
  /// FROM clause is still unread keeps the reference until that clause closes.
  void check_ref(RunScope* from, const std::string& qualifier, const std::string& name, bool partial,
                 size_t loc, bool fixable) {
    for (RunScope* s = from; s; s = s->parent) {
      if (s->phase == Phase::Items) {
        s->deferred.push_back({qualifier, name, loc});
        return;
      }
      if (!qualifier.empty()) {
        const VisibleRelation* r = s->find(qualifier);
        if (!r) continue;
        if (contains(r->relation.columns, name) || (partial && any_prefixed(r->relation.columns, name))) return;
        violate(r->relation.kind == RelationDesc::Kind::Cte ? ViolationKind::UnknownCteColumn
                                                             : ViolationKind::UnknownColumn,
                loc, qualifier + "." + name, fixable);
      }
      if (partial) {
        for (const auto& r : s->relations)
          if (any_prefixed(r.relation.columns, name) || istarts_with(r.key, name)) return;
        if (any_prefixed(s->output_aliases, name)) return;
        continue;
      }
      size_t matches = 0;
      for (const auto& r : s->relations)
        if (contains(r.relation.columns, name)) ++matches;
      if (matches > 1) violate(ViolationKind::AmbiguousColumn, loc, name, fixable);
      if (matches == 1 || contains(s->output_aliases, name)) return;
    }
    if (!qualifier.empty()) violate(ViolationKind::UnboundAlias, loc, qualifier, fixable);
    if (partial && profile_ == Profile::Extended) {
      for (auto f : string_functions())
        if (istarts_with(f, name)) return;
    }
    violate(ViolationKind::UnknownColumn, loc, name, fixable);
  }

  void check_qualifier(const std::string& q, size_t loc) const {
    for (const RunScope* s = cur_; s; s = s->parent) {
      if (s->phase == Phase::Items || s->find(q)) return;
    }
    violate(ViolationKind::UnboundAlias, loc, q, false);
  }

  /// FROM just closed: validate what the select list referenced and fix the
  /// select's output column names.
  std::vector<std::string> close_from(RunScope* s, const Select& sel) {
    s->phase = Phase::Body;
    const bool fixable = at_end();
    auto deferred = std::move(s->deferred);
    s->deferred.clear();
    for (const auto& d : deferred) check_ref(s, d.qualifier, d.name, false, d.location, fixable);
    std::vector<std::string> outputs;
    for (size_t i = 0; i < sel.items.size(); ++i) {
      const auto& item = sel.items[i];
      if (item.expr.kind == ExprKind::Star) {
        if (item.expr.qualifier.empty()) {
          for (const auto& r : s->relations)
            outputs.insert(outputs.end(), r.relation.columns.begin(), r.relation.columns.end());
        } else if (const auto* r = s->find(item.expr.qualifier)) {
          outputs.insert(outputs.end(), r->relation.columns.begin(), r->relation.columns.end());
        } else {
          violate(ViolationKind::UnboundAlias, item.expr.begin, item.expr.qualifier, fixable);
        }
      } else if (!item.alias.empty()) {
        outputs.push_back(item.alias);
      } else if (item.expr.kind == ExprKind::Column) {
        outputs.push_back(item.expr.name);
      } else {
        outputs.push_back("_c" + std::to_string(i + 1));
      }
    }
    return outputs;
  }

  // --------------------------------------------------------------- grammar

  Cte cte() {
    Cte c;
    c.begin = peek().offset;
    const Token& name = identifier_token();
    c.name = name.text;
    if (guards() && !name.partial) {
      for (const auto& [n, cols] : cur_->ctes)
        if (iequals(n, c.name)) violate(ViolationKind::DuplicateAlias, c.begin, c.name, false);
    }
    if (accept_punct("(")) {
      do {
        c.columns.push_back(identifier());
      } while (accept_punct(","));
      expect_punct(")");
    }
    expect_kw(Keyword::As);
    expect_punct("(");
    c.body = query();
    expect_punct(")");
    if (guards()) cur_->ctes.emplace_back(c.name, c.columns.empty() ? query_outputs_ : c.columns);
    return c;
  }

  Query query() {
    Query q;
    RunScope* parent = cur_;
    q.selects.push_back(select_core());
    std::vector<std::string> outputs = select_outputs_;
    RunScope* last = last_scope_;
    for (;;) {
      if (accept_kw(Keyword::Union)) {
        q.set_ops.push_back(accept_kw(Keyword::All) ? SetOp::UnionAll : SetOp::Union);
      } else if (accept_kw(Keyword::Intersect)) {
        q.set_ops.push_back(SetOp::Intersect);
      } else if (accept_kw(Keyword::Except)) {
        q.set_ops.push_back(SetOp::Except);
      } else {
        break;
      }
      q.selects.push_back(select_core());
      last = last_scope_;
    }
    if (accept_kw(Keyword::Order)) {
      expect_kw(Keyword::By);
      if (guards()) cur_ = last;
      do {
        OrderItem item;
        item.expr = expr();
        if (accept_kw(Keyword::Desc)) {
          item.descending = true;
        } else {
          accept_kw(Keyword::Asc);
        }
        q.order_by.push_back(std::move(item));
      } while (accept_punct(","));
      cur_ = parent;
    }
    if (accept_kw(Keyword::Limit)) {
      if (peek().kind != TokenKind::Number) fail({"number"});
      q.limit = next().text;
    }
    query_outputs_ = std::move(outputs);
    return q;
  }

  Select select_core() {
    Select s;
    RunScope* scope = nullptr;
    expect_kw(Keyword::Select);
    if (guards()) cur_ = scope = push_scope(Phase::Items);
    s.distinct = accept_kw(Keyword::Distinct);
    do {
      s.items.push_back(select_item());
    } while (accept_punct(","));
    expect_kw(Keyword::From);
    if (scope) scope->phase = Phase::From;
    s.from = table_ref();
    for (;;) {
      if (accept_punct(",")) {
        s.joins.push_back(JoinClause{JoinKind::Comma, table_ref(), std::nullopt});
        continue;
      }
      if (accept_kw(Keyword::Inner)) {
        if (!peek().is(Keyword::Join)) fail({"JOIN"});
      }
      if (accept_kw(Keyword::Join)) {
        JoinClause j{JoinKind::Join, table_ref(), std::nullopt};
        if (accept_kw(Keyword::On)) j.on = expr();
        s.joins.push_back(std::move(j));
        continue;
      }
      break;
    }
    std::vector<std::string> outputs;
    if (scope) outputs = close_from(scope, s);
    if (accept_kw(Keyword::Where)) s.where = expr();
    if (accept_kw(Keyword::Group)) {
      expect_kw(Keyword::By);
      do {
        s.group_by.push_back(expr());
      } while (accept_punct(","));
      if (accept_kw(Keyword::Having)) s.having = expr();
    }
    if (scope) {
      select_outputs_ = std::move(outputs);
      last_scope_ = scope;
      cur_ = scope->parent;
    }
    return s;
  }

  SelectItem select_item() {
    SelectItem item;
    const Token& t = peek();
    if (t.is_punct("*")) {
      next();
      item.expr.kind = ExprKind::Star;
      item.expr.begin = t.offset;
      item.expr.end = t.offset + 1;
      return item;
    }
    if (t.kind == TokenKind::Identifier && peek(1).is_punct(".") && peek(2).is_punct("*")) {
      item.expr.kind = ExprKind::Star;
      item.expr.qualifier = t.text;
      item.expr.begin = t.offset;
      next();
      next();
      next();
      item.expr.end = prev_end();
      return item;
    }
    item.expr = expr();
    if (accept_kw(Keyword::As)) {
      item.alias = identifier();
    } else if (peek().kind == TokenKind::Identifier) {
      item.alias = next().text;
    }
    if (guards() && !item.alias.empty()) cur_->output_aliases.push_back(item.alias);
    return item;
  }

  TableRef table_ref() {
    TableRef r;
    r.begin = peek().offset;
    VisibleRelation vr;
    bool name_partial = false;
    if (accept_punct("(")) {
      if (!peek().is(Keyword::Select)) fail({"SELECT"});
      r.subquery = std::make_shared<Query>(query());
      expect_punct(")");
      vr.relation.kind = RelationDesc::Kind::Derived;
      vr.relation.columns = query_outputs_;
    } else {
      const Token& name = identifier_token();
      r.name = name.text;
      name_partial = name.partial;
      if (guards()) {
        auto d = lookup_relation(r.name);
        if (!d && !(name_partial && relation_prefixed(r.name)))
          violate(ViolationKind::UnknownTable, r.begin, r.name, false);
        if (d) vr.relation = std::move(*d);
      }
    }
    bool alias_partial = false;
    if (accept_kw(Keyword::As)) {
      const Token& a = identifier_token();
      r.alias = a.text;
      alias_partial = a.partial;
    } else if (peek().kind == TokenKind::Identifier) {
      const Token& a = next();
      r.alias = a.text;
      alias_partial = a.partial;
    }
    if (guards()) {
      vr.key = r.alias.empty() ? r.name : r.alias;
      const bool still_open = alias_partial || (r.alias.empty() && name_partial);
      if (!vr.key.empty() && !still_open && cur_->find(vr.key))
        violate(ViolationKind::DuplicateAlias, r.begin, vr.key, r.alias.empty() && at_end());
      cur_->relations.push_back(std::move(vr));
    }
    return r;
  }

  Expr make(ExprKind kind, size_t begin) const {
    Expr e;
    e.kind = kind;
    e.begin = begin;
    return e;
  }
  Expr finish(Expr e) const {
    e.end = prev_end();
    return e;
  }

  Expr expr() { return or_expr(); }

  Expr or_expr() {
    size_t b = peek().offset;
    Expr first = and_expr();
    if (!peek().is(Keyword::Or)) return first;
    Expr e = make(ExprKind::Or, b);
    e.args.push_back(std::move(first));
    while (accept_kw(Keyword::Or)) e.args.push_back(and_expr());
    return finish(std::move(e));
  }

  Expr and_expr() {
    size_t b = peek().offset;
    Expr first = not_expr();
    if (!peek().is(Keyword::And)) return first;
    Expr e = make(ExprKind::And, b);
    e.args.push_back(std::move(first));
    while (accept_kw(Keyword::And)) e.args.push_back(not_expr());
    return finish(std::move(e));
  }

  Expr not_expr() {
    size_t b = peek().offset;
    if (accept_kw(Keyword::Not)) {
      Expr e = make(ExprKind::Not, b);
      e.args.push_back(not_expr());
      return finish(std::move(e));
    }
    return predicate();
  }

  Expr predicate() {
    size_t b = peek().offset;
    Expr left = additive();
    const Token& t = peek();
    if (t.kind == TokenKind::Punct && is_comparison(t.text)) {
      Expr e = make(ExprKind::Compare, b);
      e.op = next().text;
      e.args.push_back(std::move(left));
      e.args.push_back(additive());
      return finish(std::move(e));
    }
    bool negated = false;
    if (t.is(Keyword::Not)) {
      next();
      negated = true;
      if (!peek().is(Keyword::Between) && !peek().is(Keyword::In) && !peek().is(Keyword::Like))
        fail({"BETWEEN", "IN", "LIKE"});
    }
    if (accept_kw(Keyword::Between)) {
      Expr e = make(ExprKind::Between, b);
      e.negated = negated;
      e.args.push_back(std::move(left));
      e.args.push_back(additive());
      expect_kw(Keyword::And);
      e.args.push_back(additive());
      return finish(std::move(e));
    }
    if (accept_kw(Keyword::In)) {
      expect_punct("(");
      Expr e;
      if (peek().is(Keyword::Select)) {
        e = make(ExprKind::InQuery, b);
        e.args.push_back(std::move(left));
        e.query = std::make_shared<Query>(query());
      } else {
        e = make(ExprKind::InList, b);
        e.args.push_back(std::move(left));
        do {
          e.args.push_back(expr());
        } while (accept_punct(","));
      }
      e.negated = negated;
      expect_punct(")");
      return finish(std::move(e));
    }
    if (accept_kw(Keyword::Like)) {
      Expr e = make(ExprKind::Like, b);
      e.negated = negated;
      e.args.push_back(std::move(left));
      e.args.push_back(additive());
      return finish(std::move(e));
    }
    if (accept_kw(Keyword::Is)) {
      Expr e = make(ExprKind::IsNull, b);
      e.negated = accept_kw(Keyword::Not);
      expect_kw(Keyword::Null);
      e.args.push_back(std::move(left));
      return finish(std::move(e));
    }
    return left;
  }

  Expr additive() {
    size_t b = peek().offset;
    Expr left = multiplicative();
    while (peek().is_punct("+") || peek().is_punct("-")) {
      Expr e = make(ExprKind::Arith, b);
      e.op = next().text;
      e.args.push_back(std::move(left));
      e.args.push_back(multiplicative());
      left = finish(std::move(e));
    }
    return left;
  }

  Expr multiplicative() {
    size_t b = peek().offset;
    Expr left = unary();
    while (peek().is_punct("*") || peek().is_punct("/") || peek().is_punct("%")) {
      Expr e = make(ExprKind::Arith, b);
      e.op = next().text;
      e.args.push_back(std::move(left));
      e.args.push_back(unary());
      left = finish(std::move(e));
    }
    return left;
  }

  Expr unary() {
    size_t b = peek().offset;
    if (accept_punct("-")) {
      Expr e = make(ExprKind::Negate, b);
      e.args.push_back(unary());
      return finish(std::move(e));
    }
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    size_t b = t.offset;
    switch (t.kind) {
      case TokenKind::Number: {
        Expr e = make(ExprKind::Number, b);
        e.name = next().text;
        return finish(std::move(e));
      }
      case TokenKind::String: {
        Expr e = make(ExprKind::String, b);
        e.name = next().text;
        return finish(std::move(e));
      }
      case TokenKind::Identifier: {
        const Token& id = next();
        std::string name = id.text;
        if (accept_punct(".")) {
          if (guards()) check_qualifier(name, b);
          Expr e = make(ExprKind::Column, b);
          e.qualifier = std::move(name);
          const Token& col = identifier_token();
          e.name = col.text;
          if (guards()) check_ref(cur_, e.qualifier, e.name, col.partial, b, false);
          return finish(std::move(e));
        }
        if (peek().is_punct("(")) {
          if (profile_ != Profile::Extended || !is_string_function(name)) fail({"operator", "end of expression"});
          next();
          Expr e = make(ExprKind::Function, b);
          e.op = to_lower(name);
          e.args.push_back(expr());
          expect_punct(")");
          return finish(std::move(e));
        }
        if (guards()) check_ref(cur_, "", name, id.partial, b, at_end() && could_continue(name));
        Expr e = make(ExprKind::Column, b);
        e.name = std::move(name);
        return finish(std::move(e));
      }
      case TokenKind::Keyword:
        if (t.is(Keyword::Null)) {
          next();
          return finish(make(ExprKind::Null, b));
        }
        if (is_aggregate(t.keyword)) {
          Keyword k = next().keyword;
          Expr e = make(ExprKind::Aggregate, b);
          e.op = to_lower(keyword_text(k));
          expect_punct("(");
          if (accept_kw(Keyword::Distinct)) {
            e.distinct = true;
            e.args.push_back(expr());
          } else if (k == Keyword::Count && peek().is_punct("*")) {
            Expr star = make(ExprKind::Star, peek().offset);
            next();
            e.args.push_back(finish(std::move(star)));
          } else {
            e.args.push_back(expr());
          }
          expect_punct(")");
          return finish(std::move(e));
        }
        break;
      case TokenKind::Punct:
        if (t.text == "(") {
          next();
          if (peek().is(Keyword::Select)) {
            Expr e = make(ExprKind::Subquery, b);
            e.query = std::make_shared<Query>(query());
            expect_punct(")");
            return finish(std::move(e));
          }
          if (profile_ != Profile::Extended) fail({"SELECT"});
          Expr e = make(ExprKind::Group, b);
          e.args.push_back(expr());
          expect_punct(")");
          return finish(std::move(e));
        }
        break;
      default:
        break;
    }
    fail({"expression"});
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  Profile profile_;
  const SchemaCatalog* catalog_;
  bool failed_at_end_ = false;

  std::deque<RunScope> scopes_;
  RunScope* cur_ = nullptr;
  RunScope* last_scope_ = nullptr;
  std::vector<std::string> select_outputs_;
  std::vector<std::string> query_outputs_;
};

// ------------------------------------------------------------------ printer

std::string quote_ident(const std::string& name) {
  bool plain = !name.empty() && word_start(name[0]) && !keyword_from(name);
  for (char c : name) plain = plain && word_char(c);
  if (plain) return name;
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

std::string quote_string(const std::string& body) {
  std::string out = "'";
  for (char c : body) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  return out + "'";
}

void print_query(std::ostream& os, const Query& q);

void print_expr(std::ostream& os, const Expr& e) {
  auto join_args = [&](const char* sep, size_t from = 0) {
    for (size_t i = from; i < e.args.size(); ++i) {
      if (i > from) os << sep;
      print_expr(os, e.args[i]);
    }
  };
  switch (e.kind) {
    case ExprKind::Column:
      if (!e.qualifier.empty()) os << quote_ident(e.qualifier) << '.';
      os << quote_ident(e.name);
      break;
    case ExprKind::Star:
      if (!e.qualifier.empty()) os << quote_ident(e.qualifier) << '.';
      os << '*';
      break;
    case ExprKind::Number: os << e.name; break;
    case ExprKind::String: os << quote_string(e.name); break;
    case ExprKind::Null: os << "NULL"; break;
    case ExprKind::Negate: os << '-'; print_expr(os, e.args[0]); break;
    case ExprKind::Arith:
    case ExprKind::Compare:
      print_expr(os, e.args[0]);
      os << ' ' << e.op << ' ';
      print_expr(os, e.args[1]);
      break;
    case ExprKind::And: join_args(" AND "); break;
    case ExprKind::Or: join_args(" OR "); break;
    case ExprKind::Not: os << "NOT "; print_expr(os, e.args[0]); break;
    case ExprKind::Group: os << '('; print_expr(os, e.args[0]); os << ')'; break;
    case ExprKind::Between:
      print_expr(os, e.args[0]);
      os << (e.negated ? " NOT BETWEEN " : " BETWEEN ");
      print_expr(os, e.args[1]);
      os << " AND ";
      print_expr(os, e.args[2]);
      break;
    case ExprKind::InList:
      print_expr(os, e.args[0]);
      os << (e.negated ? " NOT IN (" : " IN (");
      join_args(", ", 1);
      os << ')';
      break;
    case ExprKind::InQuery:
      print_expr(os, e.args[0]);
      os << (e.negated ? " NOT IN (" : " IN (");
      print_query(os, *e.query);
      os << ')';
      break;
    case ExprKind::Like:
      print_expr(os, e.args[0]);
      os << (e.negated ? " NOT LIKE " : " LIKE ");
      print_expr(os, e.args[1]);
      break;
    case ExprKind::IsNull:
      print_expr(os, e.args[0]);
      os << (e.negated ? " IS NOT NULL" : " IS NULL");
      break;
    case ExprKind::Aggregate:
      os << to_upper(e.op) << '(' << (e.distinct ? "DISTINCT " : "");
      join_args(", ");
      os << ')';
      break;
    case ExprKind::Function:
      os << e.op << '(';
      join_args(", ");
      os << ')';
      break;
    case ExprKind::Subquery:
      os << '(';
      print_query(os, *e.query);
      os << ')';
      break;
  }
}

void print_table(std::ostream& os, const TableRef& t) {
  if (t.subquery) {
    os << '(';
    print_query(os, *t.subquery);
    os << ')';
  } else {
    os << quote_ident(t.name);
  }
  if (!t.alias.empty()) os << " AS " << quote_ident(t.alias);
}

void print_select(std::ostream& os, const Select& s) {
  os << "SELECT " << (s.distinct ? "DISTINCT " : "");
  for (size_t i = 0; i < s.items.size(); ++i) {
    if (i) os << ", ";
    print_expr(os, s.items[i].expr);
    if (!s.items[i].alias.empty()) os << " AS " << quote_ident(s.items[i].alias);
  }
  os << " FROM ";
  print_table(os, s.from);
  for (const auto& j : s.joins) {
    os << (j.kind == JoinKind::Comma ? ", " : " JOIN ");
    print_table(os, j.table);
    if (j.on) {
      os << " ON ";
      print_expr(os, *j.on);
    }
  }
  if (s.where) {
    os << " WHERE ";
    print_expr(os, *s.where);
  }
  if (!s.group_by.empty()) {
    os << " GROUP BY ";
    for (size_t i = 0; i < s.group_by.size(); ++i) {
      if (i) os << ", ";
      print_expr(os, s.group_by[i]);
    }
    if (s.having) {
      os << " HAVING ";
      print_expr(os, *s.having);
    }
  }
}

void print_query(std::ostream& os, const Query& q) {
  for (size_t i = 0; i < q.selects.size(); ++i) {
    if (i) os << ' ' << set_op_text(q.set_ops[i - 1]) << ' ';
    print_select(os, q.selects[i]);
  }
  if (!q.order_by.empty()) {
    os << " ORDER BY ";
    for (size_t i = 0; i < q.order_by.size(); ++i) {
      if (i) os << ", ";
      print_expr(os, q.order_by[i].expr);
      if (q.order_by[i].descending) os << " DESC";
    }
  }
  if (q.limit) os << " LIMIT " << *q.limit;
}

}  // namespace

Statement parse_complete(std::string_view sql, Profile profile) {
  Parser p(scan(sql), profile);
  return p.statement();
}

namespace detail {

RunResult run_grammar(std::vector<Token> tokens, Profile profile, const SchemaCatalog* catalog) {
  Parser p(std::move(tokens), profile, catalog);
  RunResult r;
  try {
    p.statement();
    r.outcome = RunOutcome::Complete;
    return r;
  } catch (const SyntaxError&) {
    r.outcome = p.failed_at_end() ? RunOutcome::NeedMore : RunOutcome::Fail;
  } catch (const GuardFailure& g) {
    r.violation = g.violation;
    r.outcome = g.fixable ? RunOutcome::NeedMore : RunOutcome::Fail;
  }
  if (catalog && r.outcome == RunOutcome::NeedMore) r.scope = p.snapshot();
  return r;
}

}  // namespace detail

bool lex_complete(std::string_view sql) {
  std::vector<Token> toks;
  try {
    toks = scan(sql);
  } catch (const SyntaxError&) {
    return false;
  }
  if (toks.size() < 2) return false;
  int depth = 0;
  for (size_t i = 0; i + 1 < toks.size(); ++i) {
    const Token& t = toks[i];
    if (t.is_punct("(")) ++depth;
    if (t.is_punct(")") && --depth < 0) return false;
    if (t.is_punct(";") && (i == 0 || i + 2 != toks.size())) return false;
  }
  return depth == 0;
}

std::string to_sql(const Statement& stmt) {
  std::ostringstream os;
  if (!stmt.ctes.empty()) {
    os << "WITH ";
    for (size_t i = 0; i < stmt.ctes.size(); ++i) {
      const auto& c = stmt.ctes[i];
      if (i) os << ", ";
      os << quote_ident(c.name);
      if (!c.columns.empty()) {
        os << " (";
        for (size_t k = 0; k < c.columns.size(); ++k) os << (k ? ", " : "") << quote_ident(c.columns[k]);
        os << ')';
      }
      os << " AS (";
      print_query(os, c.body);
      os << ')';
    }
    os << ' ';
  }
  print_query(os, stmt.query);
  return os.str();
}

std::string to_sql(const Query& q) {
  std::ostringstream os;
  print_query(os, q);
  return os.str();
}

std::string to_sql(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e);
  return os.str();
}

}  // namespace sqlgate
