#include <cctype>

#include "grammar_run.hpp"
#include "sqlgate/parser.hpp"
#include "sqlgate/sql_ast.hpp"

namespace sqlgate {

namespace detail {

struct TokenNode {
  Token token;
  std::shared_ptr<const TokenNode> prev;
  size_t count = 0;
};

}  // namespace detail

namespace {

using detail::RunOutcome;
using detail::TokenNode;

bool word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

enum class PendingKind { None, Word, Number, String, Quoted, Op };

struct Pending {
  PendingKind kind = PendingKind::None;
  bool closable = false;  // the text so far is a whole token by itself
  std::string body;       // unescaped literal body / word / operator
  size_t offset = 0;
};

Token make_word(std::string_view w, size_t offset) {
  Token t;
  t.offset = offset;
  if (auto kw = keyword_from(w)) {
    t.kind = TokenKind::Keyword;
    t.keyword = *kw;
    t.text = keyword_text(*kw);
  } else {
    t.kind = TokenKind::Identifier;
    t.text = std::string(w);
  }
  return t;
}

Token make_punct(std::string text, size_t offset) {
  Token t;
  t.kind = TokenKind::Punct;
  t.text = std::move(text);
  t.offset = offset;
  return t;
}

/// Scans a quoted literal starting at tail[0]. Returns the index one past the
/// closing quote when the literal is definitely over, or npos when more text
/// could still change it.
size_t scan_quoted(std::string_view tail, std::string& body, bool& closed_so_far) {
  const char q = tail[0];
  body.clear();
  closed_so_far = false;
  size_t j = 1;
  while (j < tail.size()) {
    if (tail[j] == q) {
      if (j + 1 == tail.size()) {
        closed_so_far = true;
        return std::string_view::npos;
      }
      if (tail[j + 1] == q) {
        body.push_back(q);
        j += 2;
        continue;
      }
      return j + 1;
    }
    body.push_back(tail[j++]);
  }
  return std::string_view::npos;
}

class Lexer {
 public:
  Lexer(std::string tail, size_t tail_offset) : tail_(std::move(tail)), base_(tail_offset) {}

  /// Splits off every token that can no longer change. False on a lexical
  /// error.
  bool run(std::vector<Token>& committed) {
    size_t i = 0;
    for (;;) {
      while (i < tail_.size() && space(tail_[i])) ++i;
      if (i == tail_.size()) break;
      std::string_view rest = std::string_view(tail_).substr(i);
      const size_t off = base_ + i;
      const char c = rest[0];
      if (word_start(c)) {
        size_t j = 0;
        while (j < rest.size() && word_char(rest[j])) ++j;
        if (j == rest.size()) break;
        committed.push_back(make_word(rest.substr(0, j), off));
        i += j;
      } else if (digit(c)) {
        size_t j = 0;
        while (j < rest.size() && digit(rest[j])) ++j;
        if (j < rest.size() && rest[j] == '.') {
          ++j;
          while (j < rest.size() && digit(rest[j])) ++j;
        }
        if (j == rest.size()) break;
        if (word_char(rest[j])) return false;
        Token t;
        t.kind = TokenKind::Number;
        t.text = std::string(rest.substr(0, j));
        t.offset = off;
        committed.push_back(std::move(t));
        i += j;
      } else if (c == '\'' || c == '"') {
        std::string body;
        bool closed = false;
        size_t j = scan_quoted(rest, body, closed);
        if (j == std::string_view::npos) break;
        Token t;
        t.offset = off;
        t.text = std::move(body);
        if (c == '"') {
          if (t.text.empty()) return false;
          t.kind = TokenKind::Identifier;
          t.quoted = true;
        } else {
          t.kind = TokenKind::String;
        }
        committed.push_back(std::move(t));
        i += j;
      } else if (c == '<' || c == '>' || c == '!') {
        if (rest.size() == 1) break;
        const char n = rest[1];
        std::string op(1, c);
        if (c == '!') {
          if (n != '=') return false;
          op = "!=";
        } else if (n == '=' || (c == '<' && n == '>')) {
          op.push_back(n);
        }
        committed.push_back(make_punct(op, off));
        i += op.size();
      } else if (std::string_view("(),.;*+-/%=").find(c) != std::string_view::npos) {
        committed.push_back(make_punct(std::string(1, c), off));
        ++i;
      } else {
        return false;
      }
    }
    tail_.erase(0, i);
    base_ += i;
    return true;
  }

  std::string& tail() { return tail_; }
  size_t base() const { return base_; }

 private:
  std::string tail_;
  size_t base_;
};

Pending classify(const std::string& tail, size_t offset) {
  Pending p;
  p.offset = offset;
  if (tail.empty()) return p;
  const char c = tail[0];
  if (word_start(c)) {
    p.kind = PendingKind::Word;
    p.closable = true;
    p.body = tail;
  } else if (digit(c)) {
    p.kind = PendingKind::Number;
    p.closable = true;
    p.body = tail;
  } else if (c == '\'' || c == '"') {
    bool closed = false;
    scan_quoted(tail, p.body, closed);
    p.kind = c == '"' ? PendingKind::Quoted : PendingKind::String;
    p.closable = closed && (c == '\'' || !p.body.empty());
  } else {
    p.kind = PendingKind::Op;
    p.closable = c != '!';
    p.body = c == '!' ? "!=" : std::string(1, c);
  }
  return p;
}

/// Token the pending text stands for if the input stopped here.
Token closed_token(const Pending& p) {
  switch (p.kind) {
    case PendingKind::Word: return make_word(p.body, p.offset);
    case PendingKind::Number: {
      Token t;
      t.kind = TokenKind::Number;
      t.text = p.body;
      t.offset = p.offset;
      return t;
    }
    case PendingKind::String: {
      Token t;
      t.kind = TokenKind::String;
      t.text = p.body;
      t.offset = p.offset;
      return t;
    }
    case PendingKind::Quoted: {
      Token t;
      t.kind = TokenKind::Identifier;
      t.quoted = true;
      t.text = p.body;
      t.offset = p.offset;
      return t;
    }
    default: return make_punct(p.body, p.offset);
  }
}

/// Every token the pending text could still turn into, up to the spelling
/// details the grammar does not look at.
std::vector<Token> possible_tokens(const Pending& p) {
  std::vector<Token> out;
  switch (p.kind) {
    case PendingKind::None: break;
    case PendingKind::Word: {
      for (Keyword k : all_keywords()) {
        if (istarts_with(keyword_text(k), p.body)) {
          Token t = make_word(keyword_text(k), p.offset);
          out.push_back(std::move(t));
        }
      }
      Token id;
      id.kind = TokenKind::Identifier;
      id.text = p.body;
      id.offset = p.offset;
      id.partial = true;
      out.push_back(std::move(id));
      break;
    }
    case PendingKind::Quoted: {
      Token t = closed_token(p);
      t.partial = true;
      out.push_back(std::move(t));
      break;
    }
    default: out.push_back(closed_token(p)); break;
  }
  return out;
}

Token end_token(size_t offset) {
  Token t;
  t.kind = TokenKind::End;
  t.offset = offset;
  return t;
}

}  // namespace

size_t ParserState::token_count() const { return tokens_ ? tokens_->count : 0; }

std::vector<Token> ParserState::tokens() const {
  std::vector<Token> out(token_count());
  size_t i = out.size();
  for (const TokenNode* n = tokens_.get(); n; n = n->prev.get()) out[--i] = n->token;
  return out;
}

ParserState init(Mode mode, Profile profile, std::shared_ptr<const SchemaCatalog> catalog) {
  if (mode == Mode::ParseWithGuards && !catalog)
    throw ConfigError("parsing with guards requires a schema catalog");
  ParserState s;
  s.mode_ = mode;
  s.profile_ = profile;
  s.catalog_ = std::move(catalog);
  return s;
}

ParserState advance(const ParserState& state, std::string_view fragment) {
  ParserState s = state;
  s.consumed_ += fragment.size();
  if (s.verdict_ == Verdict::Invalid) {
    s.tail_.clear();
    return s;
  }
  auto dead = [&s]() {
    s.verdict_ = Verdict::Invalid;
    s.tail_.clear();
    s.scope_.reset();
    return s;
  };

  Lexer lexer(s.tail_ + std::string(fragment), state.consumed_ - state.tail_.size());
  std::vector<Token> fresh;
  if (!lexer.run(fresh)) return dead();
  s.tail_ = std::move(lexer.tail());

  for (auto& t : fresh) {
    // Lexical bookkeeping shared by every mode.
    if (s.terminated_) return dead();
    if (t.is_punct("(")) ++s.depth_;
    if (t.is_punct(")") && --s.depth_ < 0) return dead();
    if (t.is_punct(";")) {
      if (!s.tokens_) return dead();
      s.terminated_ = true;
    }
    auto node = std::make_shared<TokenNode>();
    node->count = s.token_count() + 1;
    node->token = std::move(t);
    node->prev = std::move(s.tokens_);
    s.tokens_ = std::move(node);
  }

  const Pending pending = classify(s.tail_, lexer.base());
  if (pending.kind != PendingKind::None && s.terminated_) return dead();

  if (s.mode_ == Mode::Lex) {
    const bool has_tokens = s.tokens_ || pending.kind != PendingKind::None;
    const bool closable = pending.kind == PendingKind::None || pending.closable;
    s.verdict_ = has_tokens && closable && s.depth_ == 0 ? Verdict::Complete : Verdict::ValidPrefix;
    return s;
  }

  const SchemaCatalog* catalog = s.mode_ == Mode::ParseWithGuards ? s.catalog_.get() : nullptr;
  const std::vector<Token> base = s.tokens();
  const size_t end_offset = s.consumed_;
  auto run_with = [&](const Token* extra) {
    std::vector<Token> toks = base;
    if (extra) toks.push_back(*extra);
    toks.push_back(end_token(end_offset));
    return detail::run_grammar(std::move(toks), s.profile_, catalog);
  };

  s.violation_.reset();
  s.scope_.reset();
  if (pending.kind == PendingKind::None || pending.closable) {
    Token closed;
    if (pending.kind != PendingKind::None) closed = closed_token(pending);
    auto r = run_with(pending.kind == PendingKind::None ? nullptr : &closed);
    if (r.outcome == RunOutcome::Complete) {
      s.verdict_ = Verdict::Complete;
      return s;
    }
    s.violation_ = r.violation;
    if (r.outcome == RunOutcome::NeedMore) {
      s.verdict_ = Verdict::ValidPrefix;
      s.scope_ = r.scope;
      return s;
    }
    if (pending.kind == PendingKind::None) return dead();
  }
  for (const Token& t : possible_tokens(pending)) {
    auto r = run_with(&t);
    if (r.outcome != RunOutcome::Fail) {
      s.verdict_ = Verdict::ValidPrefix;
      s.scope_ = r.scope;
      return s;
    }
    if (!s.violation_) s.violation_ = r.violation;
  }
  auto v = s.violation_;
  dead();
  s.violation_ = v;
  return s;
}

std::vector<Verdict> feasible_extensions(const ParserState& state, std::span<const std::string> candidates) {
  if (state.verdict() == Verdict::Invalid)
    throw ContractError("feasible_extensions called on an invalid state");
  std::vector<Verdict> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(sqlgate::advance(state, c).verdict());
  return out;
}

bool accepts(std::string_view sql, Mode mode, Profile profile, const SchemaCatalog* catalog) {
  if (mode == Mode::Lex) return lex_complete(sql);
  try {
    Statement st = parse_complete(sql, profile);
    if (mode == Mode::ParseNoGuards) return true;
    if (!catalog) throw ConfigError("parsing with guards requires a schema catalog");
    return check_statement(st, *catalog).empty();
  } catch (const SyntaxError&) {
    return false;
  }
}

}  // namespace sqlgate
