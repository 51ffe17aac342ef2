#pragma once

// Minimal comma-separated I/O for the fixed numeric schemas used by the
// experiment runner. Doubles are written in shortest round-trip form, so
// reading a file back reproduces every value bit for bit (NaN and +-inf
// included).

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "qwsearch/error.hpp"

namespace qwsearch::csv {

inline std::string format_double(double v) { return fmt::format("{}", v); }

inline std::string join_header(const std::vector<std::string>& columns) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  return out;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

/// Row cursor that converts fields and reports failures with the file line.
class Row {
 public:
  Row(std::vector<std::string_view> fields, std::size_t line) : fields_(std::move(fields)), line_(line) {}

  std::string_view text(std::size_t i) const { return fields_.at(i); }

  double number(std::size_t i) const {
    const std::string s(fields_.at(i));
    if (s.empty()) fail(i, "empty numeric field");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) fail(i, "not a number");
    return v;
  }

  template <typename Int>
  Int integer(std::size_t i) const {
    const std::string_view s = fields_.at(i);
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) fail(i, "not an integer");
    return v;
  }

  bool flag(std::size_t i) const {
    const auto s = fields_.at(i);
    if (s == "1") return true;
    if (s == "0") return false;
    fail(i, "expected 0 or 1");
  }

  std::size_t line() const { return line_; }

 private:
  [[noreturn]] void fail(std::size_t i, const char* what) const {
    throw IoError(fmt::format("csv line {}, column {}: {} ('{}')", line_, i + 1, what, fields_.at(i)));
  }

  std::vector<std::string_view> fields_;
  std::size_t line_;
};

/// Reads a file with the exact header `columns` and hands each data row to
/// `consume`. Blank lines are skipped; a trailing carriage return is ignored.
template <typename Consume>
void read_file(std::istream& is, const std::vector<std::string>& columns, Consume&& consume) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("csv: missing header line");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != join_header(columns))
    throw IoError(fmt::format("csv line 1: unexpected header '{}', want '{}'", line, join_header(columns)));
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != columns.size())
      throw IoError(fmt::format("csv line {}: {} fields, want {}", lineno, fields.size(), columns.size()));
    consume(Row(std::move(fields), lineno));
  }
}

inline std::ofstream open_for_writing(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  return os;
}

inline std::ifstream open_for_reading(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return is;
}

inline void finish(std::ostream& os, const std::string& path) {
  os.flush();
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace qwsearch::csv
