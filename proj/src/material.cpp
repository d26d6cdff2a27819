#include "fvk/material.hpp"

#include <stdexcept>

namespace fvk {

LameMaterial::LameMaterial(double mu_, double lambda_) : mu(mu_), lambda(lambda_) {
  if (!(mu > 0.0)) throw std::invalid_argument("LameMaterial: mu must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("LameMaterial: lambda must be nonnegative");
}

double q3(const Eigen::Matrix3d& m, const LameMaterial& mat) {
  const Eigen::Matrix3d s = 0.5 * (m + m.transpose());
  const double tr = m.trace();
  return 2.0 * mat.mu * s.squaredNorm() + mat.lambda * tr * tr;
}

double q2_closed(const Eigen::Matrix2d& f, const LameMaterial& mat) {
  const Eigen::Matrix2d s = 0.5 * (f + f.transpose());
  const double tr = f.trace();
  // Single division keeps the value correctly rounded for rational inputs.
  const double denom = 2.0 * mat.mu + mat.lambda;
  return (2.0 * mat.mu * denom * s.squaredNorm() + 2.0 * mat.mu * mat.lambda * tr * tr) / denom;
}

Eigen::Matrix3d lift_2x2(const Eigen::Matrix2d& f) {
  Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
  out.topLeftCorner<2, 2>() = f;
  return out;
}

namespace {

Eigen::Matrix3d sym_outer_e3(const Eigen::Vector3d& c) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(0, 2) = m(2, 0) = 0.5 * c(0);
  m(1, 2) = m(2, 1) = 0.5 * c(1);
  m(2, 2) = c(2);
  return m;
}

// Polarization of Q3, used only for assembling the stationarity system.
double l3_bilinear(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b, const LameMaterial& mat) {
  return 0.5 * (q3(a + b, mat) - q3(a, mat) - q3(b, mat));
}

}  // namespace

Q2Minimized q2_minimized(const Eigen::Matrix2d& f, const LameMaterial& mat) {
  const Eigen::Matrix3d f_star = lift_2x2(f);
  Eigen::Matrix3d basis[3];
  for (int i = 0; i < 3; ++i) basis[i] = sym_outer_e3(Eigen::Vector3d::Unit(i));

  Eigen::Matrix3d a;
  Eigen::Vector3d b;
  for (int i = 0; i < 3; ++i) {
    b(i) = l3_bilinear(f_star, basis[i], mat);
    for (int j = 0; j < 3; ++j) a(i, j) = l3_bilinear(basis[i], basis[j], mat);
  }

  Eigen::LDLT<Eigen::Matrix3d> ldlt(a);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::runtime_error("q2_minimized: stationarity system not positive definite");
  const Eigen::Vector3d c = ldlt.solve(-b);

  Q2Minimized out;
  out.completion = c;
  out.value = q3(f_star + sym_outer_e3(c), mat);
  return out;
}

Eigen::Vector3d c_map(const Eigen::Matrix2d& f, const LameMaterial& mat) {
  return Eigen::Vector3d(0.0, 0.0, -mat.lambda * f.trace() / (2.0 * mat.mu + mat.lambda));
}

Eigen::Vector3d l_map(const Eigen::Matrix3d& f) {
  return Eigen::Vector3d(f(0, 2) + f(2, 0), f(1, 2) + f(2, 1), f(2, 2));
}

double l2_bilinear(const Eigen::Matrix2d& e, const Eigen::Matrix2d& f, const LameMaterial& mat) {
  const Eigen::Matrix2d se = 0.5 * (e + e.transpose());
  const Eigen::Matrix2d sf = 0.5 * (f + f.transpose());
  return 2.0 * mat.mu * se.cwiseProduct(sf).sum() + mat.trace_modulus_2d() * e.trace() * f.trace();
}

Eigen::Matrix2d l2_matrix(const Eigen::Matrix2d& e, const LameMaterial& mat) {
  const Eigen::Matrix2d se = 0.5 * (e + e.transpose());
  return 2.0 * mat.mu * se + mat.trace_modulus_2d() * e.trace() * Eigen::Matrix2d::Identity();
}

double density_W(const Eigen::Matrix3d& f, const LameMaterial& mat) {
  const Eigen::Matrix3d green = f.transpose() * f - Eigen::Matrix3d::Identity();
  const double tr = green.trace();
  return 0.25 * mat.mu * green.squaredNorm() + 0.125 * mat.lambda * tr * tr;
}

}  // namespace fvk
