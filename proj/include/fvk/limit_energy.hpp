// The limiting plate energy: stretching and bending strains, the
// quadrature energy, its analytic discrete gradient, and the weak-form
// stationarity residuals. The gradient differentiates the quadrature sum
// itself, so energy, gradient, and weak forms agree to rounding.
#pragma once

#include <utility>

#include "fvk/problem.hpp"

namespace fvk {

// sym grad w + (1/2) grad v x grad v - (sym eps)_2x2
//   - (1/2)(g2 - g1)(sym kappa)_2x2 + (1/2) sym(grad v x grad(g2 - g1)),
// with displacement derivatives by stencils and thickness derivatives exact.
Matrix2Field stretching_strain(const PlateProblem& p, const Displacement& d);

// hess v + (sym kappa)_2x2.
Matrix2Field bending_strain(const PlateProblem& p, const Displacement& d);

// (1/2) int (g1+g2) Q2(stretching) + (1/24) int (g1+g2)^3 Q2(bending).
double energy_Ig(const PlateProblem& p, const Displacement& d);

struct EnergyGradient {
  Vector2Field dw;
  ScalarField dv;

  double norm() const;
};

// Exact gradient of the discrete energy with respect to nodal values:
// <grad, delta> equals d/dt energy_Ig(d + t delta) at t = 0 for every
// nodal perturbation delta.
EnergyGradient grad_Ig(const PlateProblem& p, const Displacement& d);

// Weak Euler-Lagrange residuals against a test pair (psi, phi). Test
// fields are sampled on the grid and differentiated with the same
// stencils as the energy, so the residuals are exactly the pairings of
// grad_Ig with the sampled test fields.
std::pair<double, double> weak_residual(const PlateProblem& p, const Displacement& d,
                                        const Vector2Field& psi, const ScalarField& phi);
std::pair<double, double> weak_residual(const PlateProblem& p, const Displacement& d,
                                        const ExprVec2& psi, const Expr& phi);

double dot(const Vector2Field& a, const Vector2Field& b);
double dot(const ScalarField& a, const ScalarField& b);

}  // namespace fvk
