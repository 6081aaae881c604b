#include "sqlgate/token.hpp"

#include <array>

#include "sqlgate/common.hpp"

namespace sqlgate {

namespace {

struct KeywordEntry {
  Keyword kw;
  std::string_view text;
};

constexpr std::array<KeywordEntry, 33> kKeywords{{
    {Keyword::Select, "SELECT"}, {Keyword::Distinct, "DISTINCT"}, {Keyword::From, "FROM"},
    {Keyword::Where, "WHERE"},   {Keyword::Group, "GROUP"},       {Keyword::By, "BY"},
    {Keyword::Having, "HAVING"}, {Keyword::Order, "ORDER"},       {Keyword::Asc, "ASC"},
    {Keyword::Desc, "DESC"},     {Keyword::Limit, "LIMIT"},       {Keyword::Union, "UNION"},
    {Keyword::All, "ALL"},       {Keyword::Intersect, "INTERSECT"}, {Keyword::Except, "EXCEPT"},
    {Keyword::With, "WITH"},     {Keyword::As, "AS"},             {Keyword::Join, "JOIN"},
    {Keyword::Inner, "INNER"},   {Keyword::On, "ON"},             {Keyword::And, "AND"},
    {Keyword::Or, "OR"},         {Keyword::Not, "NOT"},           {Keyword::In, "IN"},
    {Keyword::Like, "LIKE"},     {Keyword::Between, "BETWEEN"},   {Keyword::Is, "IS"},
    {Keyword::Null, "NULL"},     {Keyword::Count, "COUNT"},       {Keyword::Sum, "SUM"},
    {Keyword::Avg, "AVG"},       {Keyword::Min, "MIN"},           {Keyword::Max, "MAX"},
}};

constexpr std::array<Keyword, 33> kKeywordList = [] {
  std::array<Keyword, 33> out{};
  for (size_t i = 0; i < kKeywords.size(); ++i) out[i] = kKeywords[i].kw;
  return out;
}();

constexpr std::array<std::string_view, 3> kStringFunctions{"lower", "upper", "trim"};

}  // namespace

std::optional<Keyword> keyword_from(std::string_view word) {
  for (const auto& e : kKeywords)
    if (iequals(e.text, word)) return e.kw;
  return std::nullopt;
}

std::string_view keyword_text(Keyword k) { return kKeywords[static_cast<size_t>(k)].text; }

std::span<const Keyword> all_keywords() { return kKeywordList; }

bool is_aggregate(Keyword k) {
  return k == Keyword::Count || k == Keyword::Sum || k == Keyword::Avg || k == Keyword::Min ||
         k == Keyword::Max;
}

bool is_string_function(std::string_view name) {
  for (auto f : kStringFunctions)
    if (iequals(f, name)) return true;
  return false;
}

std::span<const std::string_view> string_functions() { return kStringFunctions; }

bool is_comparison(std::string_view op) {
  return op == "=" || op == "!=" || op == "<>" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

}  // namespace sqlgate

// ---------------------------------------------------------------- grammar

#include "sqlgate/grammar.hpp"

namespace sqlgate {

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Lex: return "lex";
    case Mode::ParseNoGuards: return "nogrd";
    case Mode::ParseWithGuards: return "guard";
  }
  return "lex";
}

std::string_view profile_name(Profile p) { return p == Profile::Extended ? "ext" : "spider"; }

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ValidPrefix: return "valid_prefix";
    case Verdict::Complete: return "complete";
    case Verdict::Invalid: return "invalid";
  }
  return "invalid";
}

std::optional<Mode> parse_mode(std::string_view s) {
  for (Mode m : {Mode::Lex, Mode::ParseNoGuards, Mode::ParseWithGuards})
    if (iequals(s, mode_name(m))) return m;
  return std::nullopt;
}

std::optional<Profile> parse_profile(std::string_view s) {
  if (iequals(s, "spider")) return Profile::SpiderSubset;
  if (iequals(s, "ext")) return Profile::Extended;
  return std::nullopt;
}

std::optional<Verdict> parse_verdict(std::string_view s) {
  for (Verdict v : {Verdict::ValidPrefix, Verdict::Complete, Verdict::Invalid})
    if (iequals(s, verdict_name(v))) return v;
  return std::nullopt;
}

}  // namespace sqlgate
