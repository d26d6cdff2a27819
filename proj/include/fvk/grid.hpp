// Uniform tensor grids over axis-aligned rectangles, sampled fields,
// trapezoid quadrature, and the round-trip-exact CSV field format.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "fvk/expr.hpp"

namespace fvk {

// File-system failures (open/read/write) carry their own type so callers
// can map them to distinct exit codes.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Grid2D {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  int nx = 0, ny = 0;

  Grid2D() = default;
  Grid2D(double x0, double x1, double y0, double y1, int nx_, int ny_);

  double hx() const { return (x_max - x_min) / (nx - 1); }
  double hy() const { return (y_max - y_min) / (ny - 1); }
  double x(int i) const { return x_min + i * hx(); }
  double y(int j) const { return y_min + j * hy(); }
  int size() const { return nx * ny; }
  int idx(int i, int j) const { return j * nx + i; }
  bool operator==(const Grid2D&) const = default;
};

template <typename T>
T zero_value();
template <>
inline double zero_value<double>() { return 0.0; }
template <>
inline Eigen::Vector2d zero_value<Eigen::Vector2d>() { return Eigen::Vector2d::Zero(); }
template <>
inline Eigen::Matrix2d zero_value<Eigen::Matrix2d>() { return Eigen::Matrix2d::Zero(); }
template <>
inline Eigen::Matrix3d zero_value<Eigen::Matrix3d>() { return Eigen::Matrix3d::Zero(); }

// Node data of rank T on a grid, stored row-major with the x index fastest.
template <typename T>
struct GridField {
  Grid2D grid;
  std::vector<T> values;

  GridField() = default;
  explicit GridField(const Grid2D& g) : grid(g), values(g.size(), zero_value<T>()) {}

  T& at(int i, int j) { return values[grid.idx(i, j)]; }
  const T& at(int i, int j) const { return values[grid.idx(i, j)]; }
  T& operator[](int k) { return values[k]; }
  const T& operator[](int k) const { return values[k]; }
  int size() const { return static_cast<int>(values.size()); }
};

using ScalarField = GridField<double>;
using Vector2Field = GridField<Eigen::Vector2d>;
using Matrix2Field = GridField<Eigen::Matrix2d>;
using Matrix3Field = GridField<Eigen::Matrix3d>;

// Pointwise evaluation at nodes. Throws if any value is non-finite,
// naming the offending node.
ScalarField sample(const Expr& e, const Grid2D& grid);
Vector2Field sample(const ExprVec2& e, const Grid2D& grid);
Matrix2Field sample(const ExprMat2& e, const Grid2D& grid);
Matrix3Field sample(const ExprMat3& e, const Grid2D& grid);

// Composite trapezoid weight of node (i, j); exact for bilinear integrands.
double trapezoid_weight(const Grid2D& grid, int i, int j);
ScalarField trapezoid_weights(const Grid2D& grid);
double integrate(const ScalarField& f);

// CSV with header "x1,x2,<components...>", one row per node in storage
// order, numbers printed in shortest round-trip form.
void write_csv(const std::string& path, const ScalarField& f, const std::string& name = "v");
void write_csv(const std::string& path, const Vector2Field& f, const std::string& base = "w");
void write_csv(const std::string& path, const Matrix2Field& f, const std::string& base = "m");
void write_csv(const std::string& path, const Matrix3Field& f, const std::string& base = "m");

ScalarField read_scalar_csv(const std::string& path, const Grid2D& grid);
Vector2Field read_vector2_csv(const std::string& path, const Grid2D& grid);

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

}  // namespace fvk
