#include "descentlab/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace descentlab::csv {

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw std::invalid_argument("csv: no column named '" + name + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

bool Table::has_column(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

namespace {

// Splits one line; supports double-quoted fields with "" escapes.
std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

Table parse(std::istream& in, const ReadOptions& opts, const std::string& origin) {
  Table table;
  std::string line;
  std::size_t line_number = 0;
  if (!std::getline(in, line)) {
    throw std::runtime_error("csv: '" + origin + "' is empty");
  }
  ++line_number;
  table.header = split_line(line, opts.delimiter);

  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_line(line, opts.delimiter);
    if (fields.size() != table.header.size()) {
      if (opts.strict) {
        throw std::runtime_error("csv: line " + std::to_string(line_number) + " of '" + origin +
                                 "' has " + std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(table.header.size()));
      }
      ++table.skipped_rows;
      continue;
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

}  // namespace

Table read_file(const std::string& path, const ReadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
  return parse(in, opts, path);
}

Table read_string(const std::string& text, const ReadOptions& opts) {
  std::istringstream in(text);
  return parse(in, opts, "<string>");
}

void write_file(const std::string& path, const Table& table, char delimiter) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot open '" + path + "' for writing");
  const auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << delimiter;
      const bool needs_quotes = row[i].find(delimiter) != std::string::npos ||
                                row[i].find('"') != std::string::npos;
      if (needs_quotes) {
        out << '"';
        for (char c : row[i]) {
          if (c == '"') out << '"';
          out << c;
        }
        out << '"';
      } else {
        out << row[i];
      }
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) write_row(row);
  if (!out) throw std::runtime_error("csv: failed writing '" + path + "'");
}

std::string format_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

double parse_double(const std::string& field, std::size_t line_number) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{}) {
    throw std::runtime_error("csv: unparsable number '" + field + "' at line " +
                             std::to_string(line_number));
  }
  return value;
}

}  // namespace descentlab::csv
