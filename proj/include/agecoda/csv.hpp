#pragma once

// Minimal delimited-text reader/writer: comma or tab, UTF-8, double quotes
// with "" escapes. No embedded newlines inside fields.

#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agecoda/errors.hpp"

namespace agecoda::csvio {

struct Table {
  char delimiter = ',';
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // data rows, header excluded

  /// 1-based file row number of data row i (header is row 1).
  static std::size_t file_row(std::size_t i) { return i + 2; }
};

inline std::vector<std::string> split_record(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

/// Reads the whole stream. The delimiter is taken from the header row: tab if
/// one is present there, comma otherwise. Trailing CR (from CRLF files) is
/// stripped; blank lines are skipped.
inline Table read_table(std::istream& in) {
  Table table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      table.delimiter = line.find('\t') != std::string::npos ? '\t' : ',';
      table.header = split_record(line, table.delimiter);
      have_header = true;
    } else {
      table.rows.push_back(split_record(line, table.delimiter));
    }
  }
  return table;
}

inline std::optional<std::size_t> column_index(const Table& table, std::string_view name) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == name) return i;
  }
  return std::nullopt;
}

inline std::optional<double> parse_double(std::string_view text) {
  // strip surrounding spaces; WPP exports occasionally pad numeric cells
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

inline std::optional<long> parse_int(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  long value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

inline bool needs_quoting(std::string_view field, char delimiter) {
  return field.find(delimiter) != std::string_view::npos ||
         field.find('"') != std::string_view::npos ||
         field.find('\n') != std::string_view::npos;
}

inline void write_row(std::ostream& out, std::span<const std::string> fields, char delimiter = ',') {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << delimiter;
    if (needs_quoting(fields[i], delimiter)) {
      out << '"';
      for (char c : fields[i]) {
        if (c == '"') out << '"';
        out << c;
      }
      out << '"';
    } else {
      out << fields[i];
    }
  }
  out << '\n';
}

}  // namespace agecoda::csvio
