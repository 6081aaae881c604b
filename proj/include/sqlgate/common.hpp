#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sqlgate {

enum class ErrorCode {
  Usage,
  Format,
  Integrity,
  Io,
  Config,
  Contract,
  Adaptation,
  Generation,
  NotFound,
};

std::string_view error_code_name(ErrorCode code);

/// Base for every failure the library reports by exception. The C API and the
/// service translate `code()` into status values / error records.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& m) : Error(ErrorCode::Usage, m) {}
};
class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& m) : Error(ErrorCode::NotFound, m) {}
};
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& m) : Error(ErrorCode::Format, m) {}
};
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& m) : Error(ErrorCode::Integrity, m) {}
};
class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCode::Io, m) {}
};
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorCode::Config, m) {}
};
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& m) : Error(ErrorCode::Contract, m) {}
};

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
/// True when `prefix` is a case-insensitive prefix of `s`.
bool istarts_with(std::string_view s, std::string_view prefix);
std::string trim(std::string_view s);
/// Lowercase, trim, and collapse internal whitespace runs to one space.
std::string normalize_value(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace sqlgate
