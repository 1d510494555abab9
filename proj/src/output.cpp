#include "dlcz/output.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dlcz {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const Table& table) {
  for (const auto& [k, v] : table.metadata) out << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void write_sidecar(std::ostream& out, const Table& table) {
  nlohmann::ordered_json j;
  j["columns"] = table.columns;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.metadata) j["metadata"][k] = v;
  j["effective_config"] = table.effective_config.empty()
                              ? nlohmann::ordered_json()
                              : nlohmann::ordered_json::parse(table.effective_config);
  out << j.dump(2) << '\n';
}

std::string sidecar_path(const std::string& csv_path) {
  const std::string ext = ".csv";
  if (csv_path.size() > ext.size() &&
      csv_path.compare(csv_path.size() - ext.size(), ext.size(), ext) == 0) {
    return csv_path.substr(0, csv_path.size() - ext.size()) + ".json";
  }
  return csv_path + ".json";
}

std::pair<std::vector<double>, std::vector<double>> read_csv_columns(
    std::istream& in, const std::string& x_column, const std::string& y_column,
    const std::string& source) {
  auto fail = [&](int line, const std::string& msg) {
    throw std::runtime_error(source + ":" + std::to_string(line) + ": " + msg);
  };
  std::string line;
  int line_no = 0;
  std::ptrdiff_t xi = -1, yi = -1;
  std::size_t width = 0;
  std::vector<double> xs, ys;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line);
    if (xi < 0) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == x_column) xi = static_cast<std::ptrdiff_t>(i);
        if (fields[i] == y_column) yi = static_cast<std::ptrdiff_t>(i);
      }
      if (xi < 0 || yi < 0) fail(line_no, "header lacks " + x_column + " or " + y_column);
      width = fields.size();
      continue;
    }
    if (fields.size() != width) fail(line_no, "expected " + std::to_string(width) + " fields");
    double v[2];
    const std::string* f[2] = {&fields[static_cast<std::size_t>(xi)],
                               &fields[static_cast<std::size_t>(yi)]};
    for (int k = 0; k < 2; ++k) {
      const char* b = f[k]->data();
      const char* e = b + f[k]->size();
      const auto res = std::from_chars(b, e, v[k]);
      if (res.ec != std::errc() || res.ptr != e) fail(line_no, "not a number: '" + *f[k] + "'");
    }
    xs.push_back(v[0]);
    ys.push_back(v[1]);
  }
  if (xi < 0) fail(line_no, "no header row");
  if (xs.empty()) fail(line_no, "no data rows");
  return {xs, ys};
}

}  // namespace dlcz
