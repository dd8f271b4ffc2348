#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mledist/grid.hpp"

namespace mledist::csv {

/// Round-trip exact, locale independent.
std::string format_double(double v);

/// Reads the first numeric column of a CSV file; a non-numeric first row is
/// taken as a header.
std::vector<double> read_column(const std::filesystem::path& path);

/// Reads a CSV with a header into named columns; non-numeric cells become NaN.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::vector<double> numeric_column(std::string_view name) const;
};
Table read_table(const std::filesystem::path& path);

/// z,value,method
std::string curve_csv(const CdfCurve& curve);
std::string curve_csv(const Grid& grid, std::span<const double> values,
                      std::string_view method);
/// draw_index,theta
std::string draws_csv(std::span<const double> draws);

void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace mledist::csv
