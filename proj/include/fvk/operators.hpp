// Finite-difference operators on uniform tensor grids: second-order
// central stencils in the interior, shifted one-sided second-order
// stencils at the boundary, exact adjoints for every operator, and the
// pointwise algebra (cofactor, Airy bracket, planar incompatibility).
#pragma once

#include "fvk/grid.hpp"

namespace fvk {

// One-dimensional derivative stencils, one row per node. Weights come from
// a Fornberg solve so every row differentiates polynomials of the row's
// degree exactly.
struct Deriv1D {
  struct Row {
    int start;                  // absolute index of the first node in the window
    std::vector<double> weight;
  };
  std::vector<Row> rows;
};

// Weights for the m-th derivative at z given nodes xs (Fornberg).
std::vector<double> fd_weights(double z, const std::vector<double>& xs, int m);

// Stencil tables for one axis: first/second derivative (3- and 4-point
// one-sided rows at the ends) and the fourth derivative (5-point central,
// 6-point shifted rows near the ends).
Deriv1D make_deriv1(int n, double h);
Deriv1D make_deriv2(int n, double h);
Deriv1D make_deriv4(int n, double h);

// All 2D operators for one grid. Adjoints are the exact transposes of the
// stencil applications, so <D f, g> = <f, D^T g> holds to rounding; the
// discrete energy gradient depends on this.
class GridOperators {
 public:
  explicit GridOperators(const Grid2D& grid);

  const Grid2D& grid() const { return grid_; }

  ScalarField dx(const ScalarField& f) const;
  ScalarField dy(const ScalarField& f) const;
  ScalarField dxx(const ScalarField& f) const;
  ScalarField dyy(const ScalarField& f) const;
  ScalarField dxy(const ScalarField& f) const;  // dx applied to dy f

  ScalarField dx_adjoint(const ScalarField& f) const;
  ScalarField dy_adjoint(const ScalarField& f) const;
  ScalarField dxx_adjoint(const ScalarField& f) const;
  ScalarField dyy_adjoint(const ScalarField& f) const;
  ScalarField dxy_adjoint(const ScalarField& f) const;

  Vector2Field grad(const ScalarField& f) const;
  Matrix2Field hessian(const ScalarField& f) const;
  ScalarField laplacian(const ScalarField& f) const;
  // Direct 13-point stencil in the interior (d4x + 2 dxx dyy + d4y),
  // shifted one-sided rows near the boundary. Requires nx, ny >= 7.
  ScalarField biharmonic(const ScalarField& f) const;

 private:
  Grid2D grid_;
  Deriv1D d1x_, d1y_, d2x_, d2y_, d4x_, d4y_;

  ScalarField apply_x(const Deriv1D& d, const ScalarField& f) const;
  ScalarField apply_y(const Deriv1D& d, const ScalarField& f) const;
  ScalarField apply_x_adjoint(const Deriv1D& d, const ScalarField& f) const;
  ScalarField apply_y_adjoint(const Deriv1D& d, const ScalarField& f) const;
};

// cof [[a,b],[c,d]] = [[d,-c],[-b,a]], pointwise.
Matrix2Field cof2(const Matrix2Field& m);
Eigen::Matrix2d cof2(const Eigen::Matrix2d& m);

// Airy bracket [u, p] = <hess u : cof hess p>, pointwise; symmetric in
// its arguments, and [v, v] / 2 is the Gaussian curvature of v.
ScalarField airy_bracket(const GridOperators& ops, const ScalarField& u, const ScalarField& p);

// Planar incompatibility curl^T curl M = d11 M22 + d22 M11 - d12 (M12 + M21).
ScalarField curl_t_curl(const GridOperators& ops, const Matrix2Field& m);

// Quadrature-weighted L2 norm over nodes at least `margin` away from the
// boundary in both axes.
double interior_l2_norm(const ScalarField& f, int margin);

}  // namespace fvk
