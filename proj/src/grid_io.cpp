#include "nloc/grid_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nloc {
namespace {

static_assert(std::endian::native == std::endian::little, "binary grid format assumes little-endian");

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw Error("io-error", "truncated binary grid function");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io-error", "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("io-error", "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const GridFunction<double>& u) {
  const Grid& g = u.grid();
  std::string out = g.dim() == 1 ? "i0,value\n" : "i0,i1,value\n";
  for (Index i = 0; i < g.size(); ++i) {
    const Multi idx = g.unravel(i);
    out += std::to_string(idx[0]);
    if (g.dim() == 2) out += "," + std::to_string(idx[1]);
    out += "," + format_double(u(i)) + "\n";
  }
  return out;
}

GridFunction<double> from_csv(const Grid& grid, const std::string& text) {
  GridFunction<double> u(grid);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    Multi idx{0, 0};
    for (int a = 0; a < grid.dim(); ++a) {
      std::getline(row, field, ',');
      idx[a] = std::stoll(field);
    }
    std::getline(row, field, ',');
    if (!grid.contains(idx)) throw Error("io-error", "CSV index outside the grid: " + line);
    u(idx) = std::stod(field);
  }
  return u;
}

std::string to_binary(const GridFunction<double>& u) {
  const Grid& g = u.grid();
  std::string out;
  put<std::int32_t>(out, g.dim());
  for (int a = 0; a < g.dim(); ++a) put<std::int64_t>(out, g.cells(a));
  put<double>(out, g.h());
  for (Index i = 0; i < g.size(); ++i) put<double>(out, u(i));
  return out;
}

GridFunction<double> from_binary(const std::string& bytes) {
  std::size_t pos = 0;
  const int dim = take<std::int32_t>(bytes, pos);
  if (dim < 1 || dim > kMaxDim) throw Error("io-error", "bad dimension in binary grid function");
  std::vector<Index> cells;
  for (int a = 0; a < dim; ++a) cells.push_back(take<std::int64_t>(bytes, pos));
  const double h = take<double>(bytes, pos);
  std::vector<double> half;
  for (Index c : cells) half.push_back(0.5 * h * static_cast<double>(c));
  GridFunction<double> u(Grid(dim, half, cells));
  for (Index i = 0; i < u.size(); ++i) u(i) = take<double>(bytes, pos);
  if (pos != bytes.size()) throw Error("io-error", "trailing bytes in binary grid function");
  return u;
}

void write_csv(const std::filesystem::path& path, const GridFunction<double>& u) {
  atomic_write(path, to_csv(u));
}

void write_binary(const std::filesystem::path& path, const GridFunction<double>& u) {
  atomic_write(path, to_binary(u));
}

GridFunction<double> read_binary(const std::filesystem::path& path) { return from_binary(slurp(path)); }

}  // namespace nloc
