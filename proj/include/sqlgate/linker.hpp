#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sqlgate/catalog.hpp"
#include "sqlgate/common.hpp"

namespace sqlgate {

class AdaptationError : public Error {
 public:
  explicit AdaptationError(const std::string& m) : Error(ErrorCode::Adaptation, m) {}
};

/// One schema-annotation record: an English clause plus the two entities it
/// relates.
struct SafEntry {
  std::string phrase;
  std::string table1, column1;
  DataType type1 = DataType::Other;
  std::string table2, column2;
  DataType type2 = DataType::Other;
  size_t line = 0;  // where the record starts
  bool operator==(const SafEntry& o) const {
    return phrase == o.phrase && table1 == o.table1 && column1 == o.column1 && type1 == o.type1 &&
           table2 == o.table2 && column2 == o.column2 && type2 == o.type2;
  }
};

/// Parses SAF text. With a catalog, table/column pairs must resolve
/// (IntegrityError); a record missing a property is a FormatError naming
/// the line.
std::vector<SafEntry> parse_saf_text(std::string_view text, const SchemaCatalog* catalog = nullptr);
std::vector<SafEntry> parse_saf(const std::string& path, const SchemaCatalog* catalog = nullptr);

struct Constraint {
  bool negated = false;
  std::string predicate;  // hasPartOfSpeech | hasLemmaForm | hasParseFeature
  std::string argument;
  bool operator==(const Constraint&) const = default;
};

struct Arc {
  std::string role;  // subj | obj
  std::string target;
  std::vector<Constraint> constraints;
  bool operator==(const Arc&) const = default;
};

struct Binding {
  std::string placeholder;
  std::string lemma;  // what the placeholder stood for, e.g. "product"
  std::string table, column;
  DataType type = DataType::Other;
  bool operator==(const Binding&) const = default;
};

/// TRF and LRF rules share one shape; only LRF rules carry bindings.
struct Rule {
  std::string name;
  std::string head;
  std::vector<Constraint> head_constraints;
  std::vector<Arc> arcs;
  std::vector<Binding> bindings;
  bool operator==(const Rule&) const = default;
};

std::vector<Rule> parse_rules(std::string_view text);
std::vector<Rule> load_rules(const std::string& path);
std::string write_rules(const std::vector<Rule>& rules);

/// Instantiates every rule whose head accepts the entry's verb.
std::vector<Rule> adapt(const std::vector<Rule>& trf, const std::vector<SafEntry>& saf);

enum class Pos { Noun, Verb, Adj, Adv, Num, Other };
std::string_view pos_name(Pos p);

struct AnnotatedToken {
  std::string surface;
  std::string lemma;
  Pos pos = Pos::Other;
  std::set<std::string> features;
  size_t begin = 0, end = 0;
};

std::vector<AnnotatedToken> annotate(std::string_view question);

struct DataItem {
  std::string table;   // uppercase
  std::string column;  // uppercase
  DataType data_type = DataType::Other;
  std::optional<std::string> focus;
  bool aggr_flag = false;
  std::optional<std::string> aggr_function;
  bool filter_flag = false;
  std::optional<std::string> value;
  std::optional<std::string> op;
  bool ambiguous = false;

  std::string key() const { return "[" + table + "].[" + column + "]"; }
  bool operator==(const DataItem&) const = default;
};

/// `[T].[C]={k=v, ...}` lines, one per item.
std::string format_data_items(const std::vector<DataItem>& items);

/// Rule matching plus dictionary and numeric filters. Takes no database
/// handle: everything comes from the offline LRF and dictionary.
std::vector<DataItem> process_query(std::string_view question, const std::vector<Rule>& lrf,
                                    const ValueDictionary& dict, const SchemaCatalog& catalog);

struct ColumnValue {
  std::string table, column, value;
  bool operator==(const ColumnValue&) const = default;
};

std::vector<ColumnValue> extract_column_value_pairs(const std::vector<DataItem>& items);

}  // namespace sqlgate
