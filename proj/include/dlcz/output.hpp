#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace dlcz {

/// A result table with ordered metadata. Cells are already formatted, so the
/// CSV and the JSON sidecar print the same characters.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::string effective_config;  ///< JSON text, empty when there is none

  void add_meta(std::string key, std::string value) {
    metadata.emplace_back(std::move(key), std::move(value));
  }
};

/// Shortest text that reads back to the same double ("nan"/"inf" otherwise).
std::string format_number(double x);

/// '#'-prefixed "key: value" lines, the header row, then comma-separated rows,
/// all LF-terminated.
void write_csv(std::ostream& out, const Table& table);

/// {"columns": [...], "metadata": {...}, "effective_config": {...}} with the
/// metadata in table order.
void write_sidecar(std::ostream& out, const Table& table);

/// Sidecar path for a CSV path: a trailing ".csv" becomes ".json", otherwise
/// ".json" is appended.
std::string sidecar_path(const std::string& csv_path);

/// Reads two named numeric columns from a CSV written by write_csv. Throws
/// std::runtime_error naming the source and line on malformed input.
std::pair<std::vector<double>, std::vector<double>> read_csv_columns(
    std::istream& in, const std::string& x_column, const std::string& y_column,
    const std::string& source = "<input>");

}  // namespace dlcz
