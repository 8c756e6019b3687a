#pragma once

#include <filesystem>
#include <string>

#include "nloc/grid_function.hpp"

namespace nloc {

// Writes contents to a sibling temporary file and renames it over path.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

// Decimal text of x with 17 significant digits.
std::string format_double(double x);

// CSV with header "i0[,i1],value"; one row per cell in flat order.
std::string to_csv(const GridFunction<double>& u);
GridFunction<double> from_csv(const Grid& grid, const std::string& text);

// Little-endian: int32 N, int64 cells[N], float64 h, float64 values[].
std::string to_binary(const GridFunction<double>& u);
GridFunction<double> from_binary(const std::string& bytes);

void write_csv(const std::filesystem::path& path, const GridFunction<double>& u);
void write_binary(const std::filesystem::path& path, const GridFunction<double>& u);
GridFunction<double> read_binary(const std::filesystem::path& path);

}  // namespace nloc
