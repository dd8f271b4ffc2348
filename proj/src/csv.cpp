#include "mledist/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mledist/error.hpp"

namespace mledist::csv {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_cell(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::vector<double> read_column(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  std::vector<double> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_line(line);
    double v = 0.0;
    if (cells.empty() || !parse_cell(cells[0], v)) {
      if (first) {
        first = false;
        continue;
      }
      throw DomainError("non-numeric value '" + (cells.empty() ? "" : cells[0]) + "' in " +
                        path.string());
    }
    first = false;
    out.push_back(v);
  }
  return out;
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  Table t;
  std::string line;
  if (std::getline(in, line)) t.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split_line(line));
  }
  return t;
}

std::vector<double> Table::numeric_column(std::string_view name) const {
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) col = i;
  }
  if (col == header.size()) throw DomainError("no column '" + std::string(name) + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    double v = std::numeric_limits<double>::quiet_NaN();
    if (col < r.size()) parse_cell(r[col], v);
    out.push_back(v);
  }
  return out;
}

std::string curve_csv(const Grid& grid, std::span<const double> values,
                      std::string_view method) {
  std::string s = "z,value,method\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    s += format_double(grid[i]);
    s += ',';
    s += format_double(values[i]);
    s += ',';
    s += method;
    s += '\n';
  }
  return s;
}

std::string curve_csv(const CdfCurve& curve) {
  return curve_csv(curve.grid, curve.values, to_string(curve.method));
}

std::string draws_csv(std::span<const double> draws) {
  std::string s = "draw_index,theta\n";
  for (std::size_t i = 0; i < draws.size(); ++i) {
    s += std::to_string(i);
    s += ',';
    s += format_double(draws[i]);
    s += '\n';
  }
  return s;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  out << contents;
}

}  // namespace mledist::csv
