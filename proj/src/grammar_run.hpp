#pragma once

// Internal bridge between the recursive-descent grammar and the incremental
// front-end. Not installed.

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "sqlgate/catalog.hpp"
#include "sqlgate/grammar.hpp"
#include "sqlgate/guards.hpp"
#include "sqlgate/token.hpp"

namespace sqlgate::detail {

/// Whole-string scanner; throws SyntaxError. The result ends with an End token.
std::vector<Token> scan(std::string_view s);

enum class RunOutcome { Complete, NeedMore, Fail };

struct RunResult {
  RunOutcome outcome = RunOutcome::Fail;
  std::optional<GuardViolation> violation;
  std::shared_ptr<const Scope> scope;  // innermost scope where input ran out
};

/// Runs the grammar over `tokens` (End-terminated). Failing only because
/// input ran out yields NeedMore. With a catalog the schema guards run too;
/// a guard failure that more input could still repair also yields NeedMore.
RunResult run_grammar(std::vector<Token> tokens, Profile profile, const SchemaCatalog* catalog);

}  // namespace sqlgate::detail
