#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlgate/catalog.hpp"
#include "sqlgate/sql_ast.hpp"

namespace sqlgate {

enum class EmVerdict { Match, NoMatch, GoldUnparseable, PredUnparseable };
enum class ExVerdict { Match, NoMatch, GoldExecError, PredExecError };
std::string_view em_verdict_name(EmVerdict v);
std::string_view ex_verdict_name(ExVerdict v);

/// Order-insensitive rendering of a statement: AND/OR siblings, FROM
/// relations, join conditions and GROUP BY are sets; aliases and CTE names
/// are renamed away. With compare_values=false every literal becomes `?`.
std::string canonicalize(const Statement& stmt, const SchemaCatalog* catalog, bool compare_values);
/// Parses under the extended profile first; nullopt when it does not parse.
std::optional<std::string> canonical_form(std::string_view sql, const SchemaCatalog* catalog, bool compare_values);

EmVerdict exact_match(std::string_view gold, std::string_view pred, const SchemaCatalog* catalog,
                      bool compare_values = true);

constexpr std::chrono::milliseconds kStatementTimeout{5000};

/// Opens `db_path` read-only (IoError when unreadable) and compares results.
ExVerdict execution_accuracy(std::string_view gold, std::string_view pred, const std::string& db_path,
                             std::chrono::milliseconds timeout = kStatementTimeout);

struct EvalInput {
  std::string question;
  std::string gold;
  std::string pred;
};

struct EvalRecord {
  std::string question;
  std::string gold_sql;
  std::string pred_sql;
  std::optional<EmVerdict> em;
  std::optional<ExVerdict> ex;
};

struct EvalOptions {
  bool em = true;
  bool ex = true;
  bool compare_values = true;
  unsigned jobs = 1;
  std::chrono::milliseconds timeout = kStatementTimeout;
};

struct MetricTotals {
  size_t scored = 0;    // denominator
  size_t matched = 0;
  size_t excluded = 0;  // gold could not be parsed / executed
  std::optional<double> percent() const;
};

struct CorpusReport {
  std::vector<EvalRecord> records;
  std::optional<MetricTotals> em;
  std::optional<MetricTotals> ex;
  bool empty() const { return records.empty(); }
};

/// `db_path` is only opened when EX is requested.
CorpusReport evaluate_corpus(const std::vector<EvalInput>& inputs, const SchemaCatalog* catalog,
                             const std::string& db_path, const EvalOptions& opts = {});

/// One decimal, as in published result tables.
std::string format_percent(double p);
std::string report_json(const CorpusReport& r);
std::string report_table(const CorpusReport& r, std::string_view label);

}  // namespace sqlgate
