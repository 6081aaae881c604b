#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sqlgate {

enum class DataType { Text, Integer, Decimal, Date, Boolean, Other };

std::string_view data_type_name(DataType t);
/// Accepts our own names plus the Spider vocabulary (number/time/others).
std::optional<DataType> parse_data_type(std::string_view name);
/// Maps a declared SQLite column type onto the closed set (unknown -> Other).
DataType data_type_from_declared(std::string_view declared);
bool is_numeric(DataType t);

struct Column {
  std::string name;
  DataType type = DataType::Other;
  bool operator==(const Column&) const = default;
};

struct Table {
  std::string name;
  std::vector<Column> columns;

  std::optional<size_t> find_column(std::string_view name) const;
  bool operator==(const Table&) const = default;
};

struct ColumnRef {
  size_t table = 0;
  size_t column = 0;
  bool operator==(const ColumnRef&) const = default;
};

/// Schema of one database. Immutable once loaded; identifier lookups are
/// case-insensitive while the stored names keep their original casing.
class SchemaCatalog {
 public:
  SchemaCatalog() = default;
  /// Validates the invariants (unique names, resolvable keys, non-empty
  /// tables) and throws IntegrityError on violation.
  SchemaCatalog(std::string db_id, std::vector<Table> tables,
                std::vector<std::pair<ColumnRef, ColumnRef>> foreign_keys,
                std::vector<ColumnRef> primary_keys);

  const std::string& db_id() const { return db_id_; }
  const std::vector<Table>& tables() const { return tables_; }
  const std::vector<std::pair<ColumnRef, ColumnRef>>& foreign_keys() const { return foreign_keys_; }
  const std::vector<ColumnRef>& primary_keys() const { return primary_keys_; }

  std::optional<size_t> find_table(std::string_view name) const;
  const Table* table(std::string_view name) const;
  const Column* column(std::string_view table, std::string_view column) const;

  bool operator==(const SchemaCatalog&) const = default;

 private:
  std::string db_id_;
  std::vector<Table> tables_;
  std::vector<std::pair<ColumnRef, ColumnRef>> foreign_keys_;
  std::vector<ColumnRef> primary_keys_;
};

/// Parses a Spider `tables.json`-style document (one database object).
SchemaCatalog parse_spider_schema(std::string_view json_text);
SchemaCatalog load_spider_schema(const std::string& path);
/// Emits the Spider document; `parse_spider_schema(to_spider_json(c)) == c`.
std::string to_spider_json(const SchemaCatalog& catalog);
/// Reads the live schema of an SQLite file. db_id is the file stem.
SchemaCatalog load_db_schema(const std::string& path);

struct ColumnTarget {
  std::string table;
  std::string column;
  bool operator==(const ColumnTarget&) const = default;
  auto operator<=>(const ColumnTarget&) const = default;
};

/// Normalized cell value -> columns containing it. Built offline so that
/// linking never has to touch the database.
class ValueDictionary {
 public:
  static constexpr size_t kDefaultMaxValuesPerColumn = 10000;

  ValueDictionary() = default;
  ValueDictionary(std::map<std::string, std::vector<ColumnTarget>> entries,
                  std::vector<ColumnTarget> truncated);

  const std::vector<ColumnTarget>* lookup(std::string_view normalized) const;
  const std::map<std::string, std::vector<ColumnTarget>>& entries() const { return entries_; }
  /// Columns skipped because they exceeded the distinct-value limit.
  const std::vector<ColumnTarget>& truncated() const { return truncated_; }
  /// Longest key, in words; bounds the longest-match scan.
  size_t max_key_words() const { return max_key_words_; }
  bool empty() const { return entries_.empty(); }

  std::string to_json() const;
  static ValueDictionary from_json(std::string_view text, const SchemaCatalog& catalog);

 private:
  std::map<std::string, std::vector<ColumnTarget>> entries_;
  std::vector<ColumnTarget> truncated_;
  size_t max_key_words_ = 0;
};

ValueDictionary build_value_dictionary(const SchemaCatalog& catalog, const std::string& db_path,
                                       size_t max_values_per_column =
                                           ValueDictionary::kDefaultMaxValuesPerColumn);

}  // namespace sqlgate
