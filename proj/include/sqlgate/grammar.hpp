#pragma once

#include <optional>
#include <string_view>

namespace sqlgate {

/// Strictness of the feasibility check, from lexing only up to schema guards.
enum class Mode { Lex, ParseNoGuards, ParseWithGuards };

/// SpiderSubset is the SQL that Spider-trained decoders know; Extended adds
/// WITH clauses, lower/upper/trim, and parenthesized boolean groups.
enum class Profile { SpiderSubset, Extended };

enum class Verdict { ValidPrefix, Complete, Invalid };

std::string_view mode_name(Mode m);          // lex | nogrd | guard
std::string_view profile_name(Profile p);    // spider | ext
std::string_view verdict_name(Verdict v);    // valid_prefix | complete | invalid
std::optional<Mode> parse_mode(std::string_view s);
std::optional<Profile> parse_profile(std::string_view s);
std::optional<Verdict> parse_verdict(std::string_view s);

/// Strictness order used by the mode-ordering properties.
constexpr int strictness(Mode m) { return static_cast<int>(m); }

}  // namespace sqlgate
