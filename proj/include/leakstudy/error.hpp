#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace leakstudy {

// Every failure the library reports carries one of these codes. The CLI maps
// them to distinct exit statuses and prints the code name on stderr.
enum class ErrorCode {
  Domain = 10,
  CalendarGap = 11,
  Ordering = 12,
  Ingest = 20,
  FxGap = 21,
  InsufficientHistory = 22,
  Data = 23,
  SingularDesign = 30,
  ThinHistory = 31,
  FactorGap = 32,
  InferenceUnavailable = 40,
  UndefinedTurnover = 41,
  InsufficientBaseline = 42,
  EmptySample = 43,
  Validation = 50,
  Config = 51,
  Io = 52,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

// Raised by load_table and friends; remembers where parsing stopped.
class IngestError : public Error {
public:
  IngestError(std::string file, std::size_t row, std::string column, const std::string& what);

  const std::string& file() const noexcept { return file_; }
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

private:
  std::string file_;
  std::size_t row_;
  std::string column_;
};

}  // namespace leakstudy
