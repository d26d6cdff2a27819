// Isotropic material law: Lame constants with derived plate moduli, the
// quadratic forms Q3/Q2 with their completion maps, and the 3D stored
// energy density used by the thin-film energies.
#pragma once

#include <Eigen/Dense>

namespace fvk {

// Isotropic Lame pair (mu, lambda). Derived plate moduli follow the
// plane-stress conventions: S is Young's modulus, nu Poisson's ratio,
// B the bending stiffness S / (12 (1 - nu^2)).
struct LameMaterial {
  double mu = 1.0;
  double lambda = 1.0;

  LameMaterial() = default;
  LameMaterial(double mu_, double lambda_);

  double young_modulus() const { return mu * (2.0 * mu + 3.0 * lambda) / (mu + lambda); }
  double poisson_ratio() const { return lambda / (2.0 * (lambda + mu)); }
  double bending_stiffness() const {
    const double nu = poisson_ratio();
    return young_modulus() / (12.0 * (1.0 - nu * nu));
  }
  // Coefficient of the trace term in Q2: 2 mu lambda / (2 mu + lambda).
  double trace_modulus_2d() const { return 2.0 * mu * lambda / (2.0 * mu + lambda); }
};

// Q3(M) = 2 mu |sym M|^2 + lambda (tr M)^2. Depends only on sym M.
double q3(const Eigen::Matrix3d& m, const LameMaterial& mat);

// Closed-form relaxed quadratic form on 2x2 matrices:
// Q2(F) = 2 mu |sym F|^2 + (2 mu lambda / (2 mu + lambda)) (tr F)^2.
double q2_closed(const Eigen::Matrix2d& f, const LameMaterial& mat);

struct Q2Minimized {
  double value;                // min of Q3 over completions of F
  Eigen::Vector3d completion;  // c with Q2(F) = Q3((F)* + sym(c x e3))
};

// Minimizes Q3 over all 3x3 completions whose upper-left 2x2 block is F,
// by assembling and solving the 3x3 stationarity system of the quadratic
// in the symmetric completion parameters. Uses only q3 evaluations, so it
// serves as an independent check of q2_closed.
Q2Minimized q2_minimized(const Eigen::Matrix2d& f, const LameMaterial& mat);

// Embeds a 2x2 block into a 3x3 matrix with zero third row/column.
Eigen::Matrix3d lift_2x2(const Eigen::Matrix2d& f);

// The linear completion map c(F) for symmetric F: the unique vector with
// Q2(F) = Q3((F)* + sym(c x e3)). Isotropic closed form
// c(F) = (0, 0, -lambda tr F / (2 mu + lambda)). Only sym F enters.
Eigen::Vector3d c_map(const Eigen::Matrix2d& f, const LameMaterial& mat);

// l(F): the unique vector with sym(F - (F_2x2)*) = sym(l x e3), i.e.
// l = (F13 + F31, F23 + F32, F33).
Eigen::Vector3d l_map(const Eigen::Matrix3d& f);

// Polarization of Q2: L2(E, F) = (Q2(E+F) - Q2(E) - Q2(F)) / 2.
double l2_bilinear(const Eigen::Matrix2d& e, const Eigen::Matrix2d& f, const LameMaterial& mat);

// Riesz matrix of the L2 form: <l2_matrix(E) : F> = L2(E, F) for all F.
// Equals 2 mu sym E + (2 mu lambda / (2 mu + lambda)) (tr E) Id.
Eigen::Matrix2d l2_matrix(const Eigen::Matrix2d& e, const LameMaterial& mat);

// St. Venant-Kirchhoff-type stored energy density:
// W(F) = (mu/4) |F^T F - Id|^2 + (lambda/8) (tr(F^T F - Id))^2.
// Frame indifferent, isotropic, W(Id) = 0, Hessian at Id equal to Q3.
double density_W(const Eigen::Matrix3d& f, const LameMaterial& mat);

}  // namespace fvk
