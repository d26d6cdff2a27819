#include "fvk/grid.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace fvk {

Grid2D::Grid2D(double x0, double x1, double y0, double y1, int nx_, int ny_)
    : x_min(x0), x_max(x1), y_min(y0), y_max(y1), nx(nx_), ny(ny_) {
  if (!(x_min < x_max) || !(y_min < y_max))
    throw std::invalid_argument("Grid2D: bounds must be ordered");
  if (nx < 5 || ny < 5) throw std::invalid_argument("Grid2D: need at least 5 nodes per axis");
}

namespace {

[[noreturn]] void throw_nonfinite(const Grid2D& g, int i, int j) {
  std::ostringstream os;
  os << "sample: non-finite value at node (" << i << ", " << j << ") = (" << g.x(i) << ", "
     << g.y(j) << ")";
  throw std::runtime_error(os.str());
}

}  // namespace

ScalarField sample(const Expr& e, const Grid2D& grid) {
  ScalarField out(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const double v = e.eval(grid.x(i), grid.y(j));
      if (!std::isfinite(v)) throw_nonfinite(grid, i, j);
      out.at(i, j) = v;
    }
  return out;
}

Vector2Field sample(const ExprVec2& e, const Grid2D& grid) {
  Vector2Field out(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      Eigen::Vector2d v(e[0].eval(grid.x(i), grid.y(j)), e[1].eval(grid.x(i), grid.y(j)));
      if (!v.allFinite()) throw_nonfinite(grid, i, j);
      out.at(i, j) = v;
    }
  return out;
}

Matrix2Field sample(const ExprMat2& e, const Grid2D& grid) {
  Matrix2Field out(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      Eigen::Matrix2d m;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) m(r, c) = e[2 * r + c].eval(grid.x(i), grid.y(j));
      if (!m.allFinite()) throw_nonfinite(grid, i, j);
      out.at(i, j) = m;
    }
  return out;
}

Matrix3Field sample(const ExprMat3& e, const Grid2D& grid) {
  Matrix3Field out(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      Eigen::Matrix3d m;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = e[3 * r + c].eval(grid.x(i), grid.y(j));
      if (!m.allFinite()) throw_nonfinite(grid, i, j);
      out.at(i, j) = m;
    }
  return out;
}

double trapezoid_weight(const Grid2D& grid, int i, int j) {
  const double cx = (i == 0 || i == grid.nx - 1) ? 0.5 : 1.0;
  const double cy = (j == 0 || j == grid.ny - 1) ? 0.5 : 1.0;
  return grid.hx() * grid.hy() * cx * cy;
}

ScalarField trapezoid_weights(const Grid2D& grid) {
  ScalarField w(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) w.at(i, j) = trapezoid_weight(grid, i, j);
  return w;
}

double integrate(const ScalarField& f) {
  double acc = 0.0;
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) acc += trapezoid_weight(f.grid, i, j) * f.at(i, j);
  return acc;
}

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void write_rows(const std::string& path, const Grid2D& grid,
                const std::vector<std::string>& names,
                const std::function<void(int, std::vector<double>&)>& fill) {
  std::ofstream os(path);
  if (!os) throw IoError("write_csv: cannot open " + path);
  os << "x1,x2";
  for (const auto& n : names) os << "," << n;
  os << "\n";
  std::vector<double> row(names.size());
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      fill(grid.idx(i, j), row);
      os << format_double(grid.x(i)) << "," << format_double(grid.y(j));
      for (double v : row) os << "," << format_double(v);
      os << "\n";
    }
  if (!os) throw IoError("write_csv: write failed for " + path);
}

std::vector<std::vector<double>> read_rows(const std::string& path, std::size_t expect_cols,
                                           std::size_t expect_rows) {
  std::ifstream is(path);
  if (!is) throw IoError("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw IoError("read_csv: empty file " + path);
  std::vector<std::vector<double>> rows;
  rows.reserve(expect_rows);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(expect_cols);
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      double v = 0.0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) throw std::runtime_error("read_csv: bad number in " + path);
      row.push_back(v);
      p = res.ptr;
      if (p < end && *p == ',') ++p;
    }
    if (row.size() != expect_cols)
      throw std::runtime_error("read_csv: wrong column count in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.size() != expect_rows) throw std::runtime_error("read_csv: wrong row count in " + path);
  return rows;
}

}  // namespace

void write_csv(const std::string& path, const ScalarField& f, const std::string& name) {
  write_rows(path, f.grid, {name}, [&](int k, std::vector<double>& row) { row[0] = f[k]; });
}

void write_csv(const std::string& path, const Vector2Field& f, const std::string& base) {
  write_rows(path, f.grid, {base + "1", base + "2"}, [&](int k, std::vector<double>& row) {
    row[0] = f[k](0);
    row[1] = f[k](1);
  });
}

void write_csv(const std::string& path, const Matrix2Field& f, const std::string& base) {
  std::vector<std::string> names;
  for (int r = 1; r <= 2; ++r)
    for (int c = 1; c <= 2; ++c) names.push_back(base + std::to_string(r) + std::to_string(c));
  write_rows(path, f.grid, names, [&](int k, std::vector<double>& row) {
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) row[2 * r + c] = f[k](r, c);
  });
}

void write_csv(const std::string& path, const Matrix3Field& f, const std::string& base) {
  std::vector<std::string> names;
  for (int r = 1; r <= 3; ++r)
    for (int c = 1; c <= 3; ++c) names.push_back(base + std::to_string(r) + std::to_string(c));
  write_rows(path, f.grid, names, [&](int k, std::vector<double>& row) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) row[3 * r + c] = f[k](r, c);
  });
}

ScalarField read_scalar_csv(const std::string& path, const Grid2D& grid) {
  auto rows = read_rows(path, 3, grid.size());
  ScalarField out(grid);
  for (int k = 0; k < grid.size(); ++k) out[k] = rows[k][2];
  return out;
}

Vector2Field read_vector2_csv(const std::string& path, const Grid2D& grid) {
  auto rows = read_rows(path, 4, grid.size());
  Vector2Field out(grid);
  for (int k = 0; k < grid.size(); ++k) out[k] = Eigen::Vector2d(rows[k][2], rows[k][3]);
  return out;
}

}  // namespace fvk
