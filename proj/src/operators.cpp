#include "fvk/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace fvk {

std::vector<double> fd_weights(double z, const std::vector<double>& xs, int m) {
  // Fornberg's recursive weight generation for the m-th derivative at z.
  const int n = static_cast<int>(xs.size()) - 1;
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (int j = 0; j <= i - 1; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][m];
  return w;
}

namespace {

Deriv1D make_table(int n, double h, int order, int interior_half, int edge_points) {
  Deriv1D table;
  table.rows.resize(n);
  for (int i = 0; i < n; ++i) {
    int start = i - interior_half;
    int count = 2 * interior_half + 1;
    if (start < 0 || start + count > n) {
      count = edge_points;
      start = std::min(std::max(i - edge_points / 2, 0), n - count);
    }
    std::vector<double> xs(count);
    for (int k = 0; k < count; ++k) xs[k] = (start + k) * h;
    table.rows[i] = {start, fd_weights(i * h, xs, order)};
  }
  return table;
}

}  // namespace

Deriv1D make_deriv1(int n, double h) {
  if (n < 3) throw std::invalid_argument("make_deriv1: need at least 3 nodes");
  return make_table(n, h, 1, 1, 3);
}

Deriv1D make_deriv2(int n, double h) {
  if (n < 4) throw std::invalid_argument("make_deriv2: need at least 4 nodes");
  return make_table(n, h, 2, 1, 4);
}

Deriv1D make_deriv4(int n, double h) {
  if (n < 7) throw std::invalid_argument("make_deriv4: need at least 7 nodes");
  return make_table(n, h, 4, 2, 6);
}

GridOperators::GridOperators(const Grid2D& grid)
    : grid_(grid),
      d1x_(make_deriv1(grid.nx, grid.hx())),
      d1y_(make_deriv1(grid.ny, grid.hy())),
      d2x_(make_deriv2(grid.nx, grid.hx())),
      d2y_(make_deriv2(grid.ny, grid.hy())) {
  if (grid.nx >= 7) d4x_ = make_deriv4(grid.nx, grid.hx());
  if (grid.ny >= 7) d4y_ = make_deriv4(grid.ny, grid.hy());
}

ScalarField GridOperators::apply_x(const Deriv1D& d, const ScalarField& f) const {
  ScalarField out(grid_);
  for (int j = 0; j < grid_.ny; ++j)
    for (int i = 0; i < grid_.nx; ++i) {
      const auto& row = d.rows[i];
      double acc = 0.0;
      for (std::size_t k = 0; k < row.weight.size(); ++k)
        acc += row.weight[k] * f.at(row.start + static_cast<int>(k), j);
      out.at(i, j) = acc;
    }
  return out;
}

ScalarField GridOperators::apply_y(const Deriv1D& d, const ScalarField& f) const {
  ScalarField out(grid_);
  for (int j = 0; j < grid_.ny; ++j) {
    const auto& row = d.rows[j];
    for (int i = 0; i < grid_.nx; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < row.weight.size(); ++k)
        acc += row.weight[k] * f.at(i, row.start + static_cast<int>(k));
      out.at(i, j) = acc;
    }
  }
  return out;
}

ScalarField GridOperators::apply_x_adjoint(const Deriv1D& d, const ScalarField& f) const {
  ScalarField out(grid_);
  for (int j = 0; j < grid_.ny; ++j)
    for (int i = 0; i < grid_.nx; ++i) {
      const auto& row = d.rows[i];
      const double v = f.at(i, j);
      for (std::size_t k = 0; k < row.weight.size(); ++k)
        out.at(row.start + static_cast<int>(k), j) += row.weight[k] * v;
    }
  return out;
}

ScalarField GridOperators::apply_y_adjoint(const Deriv1D& d, const ScalarField& f) const {
  ScalarField out(grid_);
  for (int j = 0; j < grid_.ny; ++j) {
    const auto& row = d.rows[j];
    for (int i = 0; i < grid_.nx; ++i) {
      const double v = f.at(i, j);
      for (std::size_t k = 0; k < row.weight.size(); ++k)
        out.at(i, row.start + static_cast<int>(k)) += row.weight[k] * v;
    }
  }
  return out;
}

ScalarField GridOperators::dx(const ScalarField& f) const { return apply_x(d1x_, f); }
ScalarField GridOperators::dy(const ScalarField& f) const { return apply_y(d1y_, f); }
ScalarField GridOperators::dxx(const ScalarField& f) const { return apply_x(d2x_, f); }
ScalarField GridOperators::dyy(const ScalarField& f) const { return apply_y(d2y_, f); }
ScalarField GridOperators::dxy(const ScalarField& f) const { return apply_x(d1x_, apply_y(d1y_, f)); }

ScalarField GridOperators::dx_adjoint(const ScalarField& f) const { return apply_x_adjoint(d1x_, f); }
ScalarField GridOperators::dy_adjoint(const ScalarField& f) const { return apply_y_adjoint(d1y_, f); }
ScalarField GridOperators::dxx_adjoint(const ScalarField& f) const { return apply_x_adjoint(d2x_, f); }
ScalarField GridOperators::dyy_adjoint(const ScalarField& f) const { return apply_y_adjoint(d2y_, f); }
ScalarField GridOperators::dxy_adjoint(const ScalarField& f) const {
  return apply_y_adjoint(d1y_, apply_x_adjoint(d1x_, f));
}

Vector2Field GridOperators::grad(const ScalarField& f) const {
  const ScalarField gx = dx(f), gy = dy(f);
  Vector2Field out(grid_);
  for (int k = 0; k < out.size(); ++k) out[k] = Eigen::Vector2d(gx[k], gy[k]);
  return out;
}

Matrix2Field GridOperators::hessian(const ScalarField& f) const {
  const ScalarField hxx = dxx(f), hyy = dyy(f), hxy = dxy(f);
  Matrix2Field out(grid_);
  for (int k = 0; k < out.size(); ++k)
    out[k] << hxx[k], hxy[k], hxy[k], hyy[k];
  return out;
}

ScalarField GridOperators::laplacian(const ScalarField& f) const {
  const ScalarField hxx = dxx(f), hyy = dyy(f);
  ScalarField out(grid_);
  for (int k = 0; k < out.size(); ++k) out[k] = hxx[k] + hyy[k];
  return out;
}

ScalarField GridOperators::biharmonic(const ScalarField& f) const {
  if (grid_.nx < 7 || grid_.ny < 7)
    throw std::invalid_argument("biharmonic: grid too small (need nx, ny >= 7)");
  const ScalarField fxxxx = apply_x(d4x_, f);
  const ScalarField fyyyy = apply_y(d4y_, f);
  const ScalarField fxxyy = apply_x(d2x_, apply_y(d2y_, f));
  ScalarField out(grid_);
  for (int k = 0; k < out.size(); ++k) out[k] = fxxxx[k] + 2.0 * fxxyy[k] + fyyyy[k];
  return out;
}

Eigen::Matrix2d cof2(const Eigen::Matrix2d& m) {
  Eigen::Matrix2d c;
  c << m(1, 1), -m(1, 0), -m(0, 1), m(0, 0);
  return c;
}

Matrix2Field cof2(const Matrix2Field& m) {
  Matrix2Field out(m.grid);
  for (int k = 0; k < m.size(); ++k) out[k] = cof2(m[k]);
  return out;
}

ScalarField airy_bracket(const GridOperators& ops, const ScalarField& u, const ScalarField& p) {
  if (!(u.grid == p.grid)) throw std::invalid_argument("airy_bracket: grids differ");
  const Matrix2Field hu = ops.hessian(u);
  const Matrix2Field hp = ops.hessian(p);
  ScalarField out(u.grid);
  for (int k = 0; k < out.size(); ++k) out[k] = hu[k].cwiseProduct(cof2(hp[k])).sum();
  return out;
}

ScalarField curl_t_curl(const GridOperators& ops, const Matrix2Field& m) {
  ScalarField m11(m.grid), m22(m.grid), m12(m.grid);
  for (int k = 0; k < m.size(); ++k) {
    m11[k] = m[k](0, 0);
    m22[k] = m[k](1, 1);
    m12[k] = m[k](0, 1) + m[k](1, 0);
  }
  const ScalarField a = ops.dxx(m22);
  const ScalarField b = ops.dyy(m11);
  const ScalarField c = ops.dxy(m12);
  ScalarField out(m.grid);
  for (int k = 0; k < out.size(); ++k) out[k] = a[k] + b[k] - c[k];
  return out;
}

double interior_l2_norm(const ScalarField& f, int margin) {
  double acc = 0.0;
  const Grid2D& g = f.grid;
  for (int j = margin; j < g.ny - margin; ++j)
    for (int i = margin; i < g.nx - margin; ++i)
      acc += trapezoid_weight(g, i, j) * f.at(i, j) * f.at(i, j);
  return std::sqrt(acc);
}

}  // namespace fvk
