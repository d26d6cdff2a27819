// Airy stress potential recovery and the strong-form Euler-Lagrange
// diagnostics: the auxiliary fields lambda_g, zeta, eta, xi, Omega_g, the
// interior residuals of the coupled system, and the natural
// boundary-condition residuals.
#pragma once

#include <utility>

#include "fvk/limit_energy.hpp"
#include "fvk/problem.hpp"

namespace fvk {

struct AiryField {
  ScalarField phi;
  Matrix2Field target;  // prescribed Hessian
  double ls_residual;   // weighted L2 norm of hess(phi) - target
  int cg_iterations;
};

// Least-squares fit of a clamped potential to a prescribed Hessian:
// minimizes the quadrature-weighted norm of hess(phi) - target over the
// space satisfying phi = dn phi = 0 on the boundary (both enforced
// exactly through a null-space parametrization of the one-sided
// normal-derivative stencils). Conjugate gradients on the normal
// equations; throws with iteration diagnostics if it stagnates.
AiryField fit_clamped_airy(const GridOperators& ops, const Matrix2Field& target,
                           double rel_tol = 1e-10, int max_iters = 400000);

// Builds the in-plane stress from the displacement,
//   T = (g1+g2) (2 mu (sym grad w + Psi(v)) + (2 mu lambda/(2 mu+lambda)) (div w + tr Psi) Id),
//   Psi(v) = (1/2) grad v x grad v - (sym eps)_2x2
//            + (1/2) sym(grad v x grad(g2-g1)) - (1/2)(sym kappa)_2x2,
// inverts the cofactor relation pointwise and fits the clamped potential.
AiryField airy_from_displacement(const PlateProblem& p, const Displacement& d);

// det hess v, pointwise.
ScalarField gauss_curvature(const GridOperators& ops, const ScalarField& v);

// curl^T curl of (sym eps)_2x2 - (1/2)(g2-g1)(sym kappa)_2x2
//                + (1/2) grad v x grad(g2-g1).
ScalarField lambda_g(const PlateProblem& p, const ScalarField& v);

// 2 grad(1/(g1+g2)) . grad(lap phi) + (S/2mu) <hess(1/(g1+g2)) : hess phi>
//   - nu lap(1/(g1+g2)) lap phi.  Thickness derivatives exact, phi by stencils.
ScalarField zeta(const PlateProblem& p, const ScalarField& phi);

// grad((g1+g2)^3) . div hess v + <hess((g1+g2)^3) : (hess v + nu cof hess v)>,
// with div hess v computed as the Laplacian applied to grad v.
ScalarField eta(const PlateProblem& p, const ScalarField& v);

// (g1+g2) [phi, g2-g1] + grad(g1+g2)^T cof(hess phi) grad(g2-g1).
ScalarField xi(const PlateProblem& p, const ScalarField& phi);

// <hess((g1+g2)^3) : (k + nu cof k)> + grad((g1+g2)^3) . div k,
// k = (sym kappa)_2x2 with exact derivatives.
ScalarField omega_g(const PlateProblem& p);

// Strong-form residual fields, valid on nodes at least `margin` away from
// the boundary (zero outside):
//   r1 = (1/(g1+g2)) lap^2 phi + zeta(phi) + S (K_G + lambda_g)
//   r2 = B (g1+g2)^3 lap^2 v - (g1+g2)[phi, v]
//        - grad(g1+g2)^T cof(hess phi) grad v + B Omega_g + B eta(v)
//        - (1/2) xi(phi).
struct ElResiduals {
  ScalarField r1;
  ScalarField r2;
  int margin;
};
ElResiduals el_residuals(const PlateProblem& p, const Displacement& d, const AiryField& airy);
ElResiduals el_residuals(const PlateProblem& p, const Displacement& d);

// Sup-norms over non-corner boundary nodes of the three natural
// boundary-condition lines (clamped Airy line; the two free-edge lines in
// Psi~ = hess v + (sym kappa)_2x2).
struct BoundaryResiduals {
  double b1;
  double b2;
  double b3;
};
BoundaryResiduals boundary_residuals(const PlateProblem& p, const Displacement& d,
                                     const AiryField& airy);
BoundaryResiduals boundary_residuals(const PlateProblem& p, const Displacement& d);

}  // namespace fvk
