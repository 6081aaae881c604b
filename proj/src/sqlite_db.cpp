#include "sqlgate/sqlite_db.hpp"

#include <sqlite3.h>

#include <atomic>
#include <cctype>
#include <filesystem>

#include "sqlgate/common.hpp"

namespace sqlgate::db {

namespace {

std::atomic<std::uint64_t> g_open_count{0};

struct Deadline {
  std::chrono::steady_clock::time_point at;
};

int progress_cb(void* arg) {
  const auto* d = static_cast<const Deadline*>(arg);
  return std::chrono::steady_clock::now() > d->at ? 1 : 0;
}

[[noreturn]] void fail(sqlite3* db, const std::string& what) {
  throw IoError(what + ": " + (db ? sqlite3_errmsg(db) : "out of memory"));
}

}  // namespace

std::uint64_t Database::open_count() { return g_open_count.load(); }

Database Database::open_readonly(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw IoError("database file not found: " + path);
  sqlite3* h = nullptr;
  int rc = sqlite3_open_v2(path.c_str(), &h, SQLITE_OPEN_READONLY | SQLITE_OPEN_NOMUTEX, nullptr);
  ++g_open_count;
  Database d(h);
  if (rc != SQLITE_OK) fail(h, "cannot open " + path);
  // Force a header read so corrupt files are reported here, not later.
  char* err = nullptr;
  if (sqlite3_exec(h, "SELECT count(*) FROM sqlite_master", nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw IoError("cannot read " + path + ": " + msg);
  }
  return d;
}

Database Database::create(const std::string& path) {
  std::error_code ec;
  std::filesystem::remove(path, ec);
  sqlite3* h = nullptr;
  int rc = sqlite3_open_v2(path.c_str(), &h,
                           SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_NOMUTEX, nullptr);
  ++g_open_count;
  Database d(h);
  if (rc != SQLITE_OK) fail(h, "cannot create " + path);
  return d;
}

Database::Database(Database&& other) noexcept : handle_(other.handle_) { other.handle_ = nullptr; }

Database& Database::operator=(Database&& other) noexcept {
  if (this != &other) {
    if (handle_) sqlite3_close(handle_);
    handle_ = other.handle_;
    other.handle_ = nullptr;
  }
  return *this;
}

Database::~Database() {
  if (handle_) sqlite3_close(handle_);
}

void Database::exec(const std::string& sql) {
  char* err = nullptr;
  if (sqlite3_exec(handle_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw IoError("sql failed: " + msg);
  }
}

Statement Database::prepare(const std::string& sql) {
  sqlite3_stmt* s = nullptr;
  const char* tail = nullptr;
  if (sqlite3_prepare_v2(handle_, sql.c_str(), static_cast<int>(sql.size()), &s, &tail) != SQLITE_OK)
    fail(handle_, "prepare failed");
  if (!s) throw IoError("empty statement");
  Statement st(handle_, s);
  for (; tail && *tail; ++tail) {
    if (*tail != ';' && !std::isspace(static_cast<unsigned char>(*tail)))
      throw IoError("more than one statement supplied");
  }
  return st;
}

ResultSet Database::query(const std::string& sql, std::chrono::milliseconds timeout) {
  Deadline deadline{std::chrono::steady_clock::now() + timeout};
  if (timeout.count() > 0) sqlite3_progress_handler(handle_, 1000, progress_cb, &deadline);
  struct Reset {
    sqlite3* h;
    ~Reset() { sqlite3_progress_handler(h, 0, nullptr, nullptr); }
  } reset{handle_};

  Statement st = prepare(sql);
  ResultSet rs;
  rs.column_count = st.column_count();
  while (st.step()) {
    Row row;
    row.reserve(static_cast<size_t>(rs.column_count));
    for (int i = 0; i < rs.column_count; ++i) row.push_back(st.column(i));
    rs.rows.push_back(std::move(row));
  }
  return rs;
}

Statement::Statement(Statement&& other) noexcept : db_(other.db_), stmt_(other.stmt_) {
  other.stmt_ = nullptr;
}

Statement::~Statement() {
  if (stmt_) sqlite3_finalize(stmt_);
}

void Statement::bind(int index, const Cell& value) {
  int rc = SQLITE_OK;
  if (std::holds_alternative<std::monostate>(value)) {
    rc = sqlite3_bind_null(stmt_, index);
  } else if (const auto* i = std::get_if<std::int64_t>(&value)) {
    rc = sqlite3_bind_int64(stmt_, index, *i);
  } else if (const auto* d = std::get_if<double>(&value)) {
    rc = sqlite3_bind_double(stmt_, index, *d);
  } else {
    const auto& s = std::get<std::string>(value);
    rc = sqlite3_bind_text(stmt_, index, s.data(), static_cast<int>(s.size()), SQLITE_TRANSIENT);
  }
  if (rc != SQLITE_OK) fail(db_, "bind failed");
}

void Statement::bind_all(const std::vector<Cell>& values) {
  for (size_t i = 0; i < values.size(); ++i) bind(static_cast<int>(i + 1), values[i]);
}

bool Statement::step() {
  int rc = sqlite3_step(stmt_);
  if (rc == SQLITE_ROW) return true;
  if (rc == SQLITE_DONE) return false;
  if (rc == SQLITE_INTERRUPT) throw IoError("statement timed out");
  fail(db_, "step failed");
}

void Statement::reset() {
  sqlite3_reset(stmt_);
  sqlite3_clear_bindings(stmt_);
}

int Statement::column_count() const { return sqlite3_column_count(stmt_); }

Cell Statement::column(int index) const {
  switch (sqlite3_column_type(stmt_, index)) {
    case SQLITE_NULL: return std::monostate{};
    case SQLITE_INTEGER: return static_cast<std::int64_t>(sqlite3_column_int64(stmt_, index));
    case SQLITE_FLOAT: return sqlite3_column_double(stmt_, index);
    default: {
      const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, index));
      int n = sqlite3_column_bytes(stmt_, index);
      return std::string(p ? p : "", static_cast<size_t>(n));
    }
  }
}

std::string quote_identifier(std::string_view name) {
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace sqlgate::db
