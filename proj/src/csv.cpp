#include "leakstudy/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "leakstudy/error.hpp"

namespace leakstudy {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::vector<std::string>> split_records(std::string_view text, const std::string& src) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  bool any = false;

  auto end_field = [&] {
    fields.push_back(field_quoted ? field : trim(field));
    field.clear();
    field_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = fields.size() == 1 && fields[0].empty();
    if (!blank) records.push_back(std::move(fields));
    fields.clear();
    any = false;
  };

  std::size_t i = 0;
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    any = true;
    if (c == '"' && trim(field).empty()) {
      field.clear();
      in_quotes = true;
      field_quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (in_quotes) {
    throw IngestError(src, records.size() + 1, "", "unterminated quoted field");
  }
  if (any || !field.empty() || !fields.empty()) end_record();
  return records;
}

}  // namespace

CsvTable CsvTable::parse(std::string_view text, std::string source_name) {
  CsvTable t;
  t.source_ = std::move(source_name);
  auto records = split_records(text, t.source_);
  if (records.empty()) throw IngestError(t.source_, 1, "", "missing header row");
  t.header_ = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header_.size()) {
      throw IngestError(t.source_, r + 1, "",
                        fmt::format("expected {} fields, found {}", t.header_.size(),
                                    records[r].size()));
    }
    t.rows_.push_back(std::move(records[r]));
  }
  return t;
}

CsvTable CsvTable::read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

std::optional<std::size_t> CsvTable::find_column(std::string_view name) const {
  const auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header_.begin());
}

bool CsvTable::has_column(std::string_view name) const { return find_column(name).has_value(); }

std::size_t CsvTable::column(std::string_view name) const {
  if (auto c = find_column(name)) return *c;
  throw IngestError(source_, 1, std::string(name), "missing column");
}

void CsvTable::fail(std::size_t r, std::size_t c, const std::string& what) const {
  throw IngestError(source_, file_row(r), header_.at(c), what);
}

const std::string& CsvTable::text(std::size_t r, std::size_t c) const { return rows_.at(r).at(c); }

double CsvTable::number(std::size_t r, std::size_t c) const {
  const std::string& s = text(r, c);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(r, c, fmt::format("cannot parse number '{}'", s));
  }
  return v;
}

std::optional<double> CsvTable::optional_number(std::size_t r, std::size_t c) const {
  const std::string& s = text(r, c);
  if (s.empty() || s == "NA" || s == "NaN" || s == "nan") return std::nullopt;
  return number(r, c);
}

long long CsvTable::integer(std::size_t r, std::size_t c) const {
  const std::string& s = text(r, c);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(r, c, fmt::format("cannot parse integer '{}'", s));
  }
  return v;
}

bool CsvTable::boolean(std::size_t r, std::size_t c) const {
  std::string s = text(r, c);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "1" || s == "true" || s == "yes" || s == "y") return true;
  if (s == "0" || s == "false" || s == "no" || s == "n") return false;
  fail(r, c, fmt::format("cannot parse boolean '{}'", text(r, c)));
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_escape(fields[i]);
  }
  out_ << '\n';
}

}  // namespace leakstudy
