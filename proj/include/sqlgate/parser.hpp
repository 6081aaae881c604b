#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sqlgate/catalog.hpp"
#include "sqlgate/grammar.hpp"
#include "sqlgate/guards.hpp"
#include "sqlgate/token.hpp"

namespace sqlgate {

namespace detail {
struct TokenNode;
}

/// Immutable snapshot of an in-progress parse. Committed tokens live in a
/// shared persistent list, so states forked from a common ancestor share it.
class ParserState {
 public:
  Mode mode() const { return mode_; }
  Profile profile() const { return profile_; }
  Verdict verdict() const { return verdict_; }
  /// Characters fed so far.
  size_t consumed() const { return consumed_; }
  /// Trailing text that is not a token yet (a word, literal or operator that
  /// may still grow).
  const std::string& pending_fragment() const { return tail_; }
  size_t token_count() const;
  std::vector<Token> tokens() const;
  /// Innermost scope at the end of the prefix (guards mode, live prefixes).
  const std::shared_ptr<const Scope>& scope() const { return scope_; }
  /// Guard violation behind the latest non-complete verdict, if any.
  const std::optional<GuardViolation>& violation() const { return violation_; }
  const SchemaCatalog* catalog() const { return catalog_.get(); }

 private:
  friend ParserState init(Mode, Profile, std::shared_ptr<const SchemaCatalog>);
  friend ParserState advance(const ParserState&, std::string_view);

  Mode mode_ = Mode::Lex;
  Profile profile_ = Profile::SpiderSubset;
  std::shared_ptr<const SchemaCatalog> catalog_;
  size_t consumed_ = 0;
  std::string tail_;
  std::shared_ptr<const detail::TokenNode> tokens_;
  int depth_ = 0;          // open parentheses among committed tokens
  bool terminated_ = false;  // a `;` was committed
  Verdict verdict_ = Verdict::ValidPrefix;
  std::optional<GuardViolation> violation_;
  std::shared_ptr<const Scope> scope_;
};

/// Empty-prefix state. Guards mode without a catalog throws ConfigError.
ParserState init(Mode mode, Profile profile, std::shared_ptr<const SchemaCatalog> catalog = nullptr);

/// Feeds arbitrary text (possibly splitting tokens). Never throws on bad SQL.
ParserState advance(const ParserState& state, std::string_view fragment);

/// Verdict of advance(state, c) for each candidate. Throws ContractError when
/// the state is already Invalid.
std::vector<Verdict> feasible_extensions(const ParserState& state, std::span<const std::string> candidates);

/// Whole-string judgement of the batch front-ends for `mode`: lex_complete,
/// parse_complete, or parse_complete plus an empty check_statement.
bool accepts(std::string_view sql, Mode mode, Profile profile, const SchemaCatalog* catalog);

}  // namespace sqlgate
