#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

struct sqlite3;
struct sqlite3_stmt;

namespace sqlgate::db {

/// One result cell. Integers and reals are kept apart so callers can decide
/// on numeric tolerance themselves.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;
using Row = std::vector<Cell>;

struct ResultSet {
  int column_count = 0;
  std::vector<Row> rows;
};

class Statement;

/// RAII handle over one SQLite connection. Not thread-safe; use one per
/// worker.
class Database {
 public:
  /// Opens an existing file read-only. Throws IoError when the file is
  /// missing or not a database.
  static Database open_readonly(const std::string& path);
  /// Creates (truncating) a writable database file.
  static Database create(const std::string& path);

  Database(Database&& other) noexcept;
  Database& operator=(Database&& other) noexcept;
  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;
  ~Database();

  void exec(const std::string& sql);
  Statement prepare(const std::string& sql);

  /// Runs a query to completion. A non-zero `timeout` aborts long-running
  /// statements; the abort surfaces as an exception like any other failure.
  ResultSet query(const std::string& sql,
                  std::chrono::milliseconds timeout = std::chrono::milliseconds{0});

  sqlite3* raw() const { return handle_; }

  /// Number of connections opened by this process. Tests use it to assert
  /// that some code path never touches a database.
  static std::uint64_t open_count();

 private:
  explicit Database(sqlite3* h) : handle_(h) {}
  sqlite3* handle_ = nullptr;
};

class Statement {
 public:
  Statement(Statement&& other) noexcept;
  Statement& operator=(Statement&&) = delete;
  Statement(const Statement&) = delete;
  ~Statement();

  void bind(int index, const Cell& value);
  void bind_all(const std::vector<Cell>& values);
  /// Returns true while a row is available.
  bool step();
  void reset();
  int column_count() const;
  Cell column(int index) const;

 private:
  friend class Database;
  Statement(sqlite3* db, sqlite3_stmt* s) : db_(db), stmt_(s) {}
  sqlite3* db_;
  sqlite3_stmt* stmt_;
};

std::string quote_identifier(std::string_view name);

}  // namespace sqlgate::db
