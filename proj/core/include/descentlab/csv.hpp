#pragma once

#include <string>
#include <vector>

namespace descentlab::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t skipped_rows = 0;  // malformed rows dropped in lenient mode

  // Column index by name; throws std::invalid_argument when absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

struct ReadOptions {
  char delimiter = ',';
  // strict: any malformed row (wrong field count) is an error with its line
  // number; lenient: the row is skipped and counted.
  bool strict = true;
};

Table read_file(const std::string& path, const ReadOptions& opts = {});
Table read_string(const std::string& text, const ReadOptions& opts = {});

void write_file(const std::string& path, const Table& table, char delimiter = ',');

// Shortest decimal form that round-trips the exact double.
std::string format_double(double value);

// Locale-independent strtod via from_chars; throws with context on failure.
double parse_double(const std::string& field, std::size_t line_number);

}  // namespace descentlab::csv
