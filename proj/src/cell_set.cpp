#include "nloc/cell_set.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace nloc {

CellSet CellSet::all(const Grid& grid) {
  CellSet s(grid);
  std::fill(s.in_.begin(), s.in_.end(), 1);
  return s;
}

CellSet CellSet::single(const Grid& grid, Index flat) {
  if (flat < 0 || flat >= grid.size()) throw Error("domain-error", "cell index outside the grid");
  CellSet s(grid);
  s.in_[flat] = 1;
  return s;
}

CellSet CellSet::box(const Grid& grid, const Point& lo, const Point& hi) {
  if (lo.size() != grid.dim() || hi.size() != grid.dim())
    throw Error("domain-error", "box corners must match the grid dimension");
  const double fuzz = 1e-12 * grid.h();
  CellSet s(grid);
  for (Index i = 0; i < grid.size(); ++i) {
    const Point c = grid.center(i);
    s.in_[i] = ((c.array() >= lo.array() - fuzz) && (c.array() <= hi.array() + fuzz)).all();
  }
  return s;
}

CellSet CellSet::ball(const Grid& grid, const Point& center, double radius) {
  if (center.size() != grid.dim()) throw Error("domain-error", "ball center must match the grid dimension");
  CellSet s(grid);
  for (Index i = 0; i < grid.size(); ++i) s.in_[i] = (grid.center(i) - center).norm() < radius;
  return s;
}

CellSet CellSet::slab(const Grid& grid, double a) {
  if (!(a > 0.0)) throw Error("domain-error", "slab half-width must be positive");
  const double fuzz = 1e-12 * grid.h();
  const double half = 0.5 * grid.h();
  CellSet s(grid);
  for (Index i = 0; i < grid.size(); ++i) s.in_[i] = std::abs(grid.center(i)(0)) + half <= a + fuzz;
  return s;
}

CellSet CellSet::from_indices(const Grid& grid, const std::vector<Index>& flat) {
  CellSet s(grid);
  for (Index i : flat) {
    if (i < 0 || i >= grid.size()) throw Error("domain-error", "cell index outside the grid");
    s.in_[i] = 1;
  }
  return s;
}

Index CellSet::count() const {
  Index n = 0;
  for (auto b : in_) n += b;
  return n;
}

std::vector<Index> CellSet::indices() const {
  std::vector<Index> out;
  for (Index i = 0; i < static_cast<Index>(in_.size()); ++i)
    if (in_[i]) out.push_back(i);
  return out;
}

bool CellSet::subset_of(const CellSet& o) const {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < in_.size(); ++i)
    if (in_[i] && !o.in_[i]) return false;
  return true;
}

CellSet CellSet::operator|(const CellSet& o) const {
  require_same_grid(grid_, o.grid_);
  CellSet s(grid_);
  for (std::size_t i = 0; i < in_.size(); ++i) s.in_[i] = in_[i] | o.in_[i];
  return s;
}

CellSet CellSet::operator&(const CellSet& o) const {
  require_same_grid(grid_, o.grid_);
  CellSet s(grid_);
  for (std::size_t i = 0; i < in_.size(); ++i) s.in_[i] = in_[i] & o.in_[i];
  return s;
}

CellSet CellSet::operator-(const CellSet& o) const {
  require_same_grid(grid_, o.grid_);
  CellSet s(grid_);
  for (std::size_t i = 0; i < in_.size(); ++i) s.in_[i] = in_[i] && !o.in_[i];
  return s;
}

CellSet CellSet::complement() const {
  CellSet s(grid_);
  for (std::size_t i = 0; i < in_.size(); ++i) s.in_[i] = !in_[i];
  return s;
}

GridFunction<double> CellSet::indicator() const {
  GridFunction<double> u(grid_);
  for (Index i = 0; i < grid_.size(); ++i) u(i) = in_[i] ? 1.0 : 0.0;
  return u;
}

namespace {

class RegionParser {
 public:
  RegionParser(const Grid& grid, const std::string& text) : grid_(grid), s_(text) {}

  CellSet parse() {
    CellSet acc = term();
    for (skip(); pos_ < s_.size(); skip()) {
      const char op = s_[pos_++];
      CellSet rhs = term();
      if (op == '+')
        acc = acc | rhs;
      else if (op == '-')
        acc = acc - rhs;
      else if (op == '*')
        acc = acc & rhs;
      else
        fail("expected +, - or *");
    }
    return acc;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error("invalid-config", "mask.region: " + why + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  double number() {
    skip();
    double v = 0.0;
    const char* begin = s_.data() + pos_;
    auto [end, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc{}) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }
  // Comma-separated numbers up to (not including) ';' or ')'.
  std::vector<double> numbers() {
    std::vector<double> out{number()};
    for (skip(); pos_ < s_.size() && s_[pos_] == ','; skip()) {
      ++pos_;
      out.push_back(number());
    }
    return out;
  }
  Point point(const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != grid_.dim()) fail("coordinate count must equal the dimension");
    Point p(grid_.dim());
    for (int a = 0; a < grid_.dim(); ++a) p(a) = v[a];
    return p;
  }
  CellSet term() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "all") return CellSet::all(grid_);
    if (name == "none") return CellSet::none(grid_);
    expect('(');
    CellSet out(grid_);
    if (name == "box") {
      const Point lo = point(numbers());
      expect(';');
      const Point hi = point(numbers());
      out = CellSet::box(grid_, lo, hi);
    } else if (name == "ball") {
      const Point c = point(numbers());
      expect(';');
      const double r = number();
      if (!(r > 0.0)) fail("ball radius must be positive");
      out = CellSet::ball(grid_, c, r);
    } else if (name == "slab") {
      const double a = number();
      if (!(a > 0.0)) fail("slab half-width must be positive");
      out = CellSet::slab(grid_, a);
    } else {
      fail("unknown region '" + name + "'");
    }
    expect(')');
    return out;
  }

  const Grid& grid_;
  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

CellSet parse_region(const Grid& grid, const std::string& expression) {
  return RegionParser(grid, expression).parse();
}

}  // namespace nloc
