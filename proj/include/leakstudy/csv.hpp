#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace leakstudy {

// RFC 4180 table with a header row. Quoted fields may contain commas,
// doubled quotes and line breaks.
class CsvTable {
public:
  static CsvTable parse(std::string_view text, std::string source_name = "<memory>");
  static CsvTable read_file(const std::string& path);

  const std::string& source() const { return source_; }
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

  bool has_column(std::string_view name) const;
  // Throws IngestError naming the file when the column is absent.
  std::size_t column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;

  // Data row r (0-based); file_row(r) gives the 1-based line-of-record number
  // counting the header as row 1.
  const std::vector<std::string>& row(std::size_t r) const { return rows_[r]; }
  std::size_t file_row(std::size_t r) const { return r + 2; }

  // Typed cell access; failures raise IngestError with row and column.
  const std::string& text(std::size_t r, std::size_t c) const;
  double number(std::size_t r, std::size_t c) const;
  std::optional<double> optional_number(std::size_t r, std::size_t c) const;
  long long integer(std::size_t r, std::size_t c) const;
  bool boolean(std::size_t r, std::size_t c) const;

  [[noreturn]] void fail(std::size_t r, std::size_t c, const std::string& what) const;

private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

class CsvWriter {
public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

private:
  std::ostream& out_;
};

std::string csv_escape(std::string_view field);

}  // namespace leakstudy
