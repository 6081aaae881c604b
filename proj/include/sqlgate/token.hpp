#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace sqlgate {

/// Reserved words of both grammar profiles. Matching is case-insensitive.
enum class Keyword : std::uint8_t {
  Select, Distinct, From, Where, Group, By, Having, Order, Asc, Desc, Limit,
  Union, All, Intersect, Except, With, As, Join, Inner, On,
  And, Or, Not, In, Like, Between, Is, Null,
  Count, Sum, Avg, Min, Max,
};

std::optional<Keyword> keyword_from(std::string_view word);
std::string_view keyword_text(Keyword k);
std::span<const Keyword> all_keywords();
bool is_aggregate(Keyword k);

/// Scalar string functions accepted by the Extended profile.
bool is_string_function(std::string_view name);
std::span<const std::string_view> string_functions();

enum class TokenKind : std::uint8_t { Keyword, Identifier, Number, String, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  Keyword keyword = Keyword::Select;  // valid when kind == Keyword
  /// Identifier name (unquoted), literal body (unescaped), or punctuation.
  std::string text;
  size_t offset = 0;
  bool quoted = false;  // identifier written as "..."
  /// Last token of a prefix whose spelling may still grow (incremental use).
  bool partial = false;

  bool is(Keyword k) const { return kind == TokenKind::Keyword && keyword == k; }
  bool is_punct(std::string_view p) const { return kind == TokenKind::Punct && text == p; }
};

bool is_comparison(std::string_view op);

}  // namespace sqlgate
