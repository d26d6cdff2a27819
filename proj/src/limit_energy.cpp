#include "fvk/limit_energy.hpp"

#include <cmath>
#include <stdexcept>

namespace fvk {

namespace {

void check_displacement(const PlateProblem& p, const Displacement& d) {
  if (!(d.w.grid == p.grid()) || !(d.v.grid == p.grid()))
    throw std::invalid_argument("displacement grid does not match the problem grid");
}

struct StrainData {
  Matrix2Field stretching;
  Matrix2Field bending;
  Vector2Field q;  // grad v + (1/2) grad(g2 - g1)
};

StrainData assemble_strains(const PlateProblem& p, const Displacement& d) {
  check_displacement(p, d);
  const GridOperators& ops = p.ops();

  ScalarField w1(p.grid()), w2(p.grid());
  for (int k = 0; k < w1.size(); ++k) {
    w1[k] = d.w[k](0);
    w2[k] = d.w[k](1);
  }
  const ScalarField w1x = ops.dx(w1), w1y = ops.dy(w1);
  const ScalarField w2x = ops.dx(w2), w2y = ops.dy(w2);
  const Vector2Field gv = ops.grad(d.v);
  const Matrix2Field hv = ops.hessian(d.v);

  StrainData out{Matrix2Field(p.grid()), Matrix2Field(p.grid()), Vector2Field(p.grid())};
  for (int k = 0; k < p.grid().size(); ++k) {
    Eigen::Matrix2d grad_w;
    grad_w << w1x[k], w1y[k], w2x[k], w2y[k];
    const Eigen::Matrix2d sym_grad_w = 0.5 * (grad_w + grad_w.transpose());
    const Eigen::Vector2d gd = p.grad_g_diff()[k];
    const Eigen::Matrix2d mixed = gv[k] * gd.transpose();
    out.stretching[k] = sym_grad_w + 0.5 * gv[k] * gv[k].transpose() - p.sym_eps_2x2()[k] -
                        0.5 * p.g_diff()[k] * p.sym_kappa_2x2()[k] +
                        0.25 * (mixed + mixed.transpose());
    out.bending[k] = hv[k] + p.sym_kappa_2x2()[k];
    out.q[k] = gv[k] + 0.5 * gd;
  }
  return out;
}

struct StressData {
  Matrix2Field m;  // weight * (g1+g2) * L2(stretching)
  Matrix2Field n;  // weight * (g1+g2)^3 / 12 * L2(bending)
};

StressData assemble_stresses(const PlateProblem& p, const StrainData& s) {
  StressData out{Matrix2Field(p.grid()), Matrix2Field(p.grid())};
  for (int k = 0; k < p.grid().size(); ++k) {
    const double wq = p.weights()[k];
    out.m[k] = wq * p.g_sum()[k] * l2_matrix(s.stretching[k], p.material());
    out.n[k] = wq * p.g_sum_cubed()[k] / 12.0 * l2_matrix(s.bending[k], p.material());
  }
  return out;
}

}  // namespace

Matrix2Field stretching_strain(const PlateProblem& p, const Displacement& d) {
  return assemble_strains(p, d).stretching;
}

Matrix2Field bending_strain(const PlateProblem& p, const Displacement& d) {
  return assemble_strains(p, d).bending;
}

double energy_Ig(const PlateProblem& p, const Displacement& d) {
  const StrainData s = assemble_strains(p, d);
  double acc = 0.0;
  for (int k = 0; k < p.grid().size(); ++k) {
    const double wq = p.weights()[k];
    acc += wq * (0.5 * p.g_sum()[k] * q2_closed(s.stretching[k], p.material()) +
                 p.g_sum_cubed()[k] / 24.0 * q2_closed(s.bending[k], p.material()));
  }
  return acc;
}

double EnergyGradient::norm() const {
  double acc = 0.0;
  for (const auto& v : dw.values) acc += v.squaredNorm();
  for (double v : dv.values) acc += v * v;
  return std::sqrt(acc);
}

EnergyGradient grad_Ig(const PlateProblem& p, const Displacement& d) {
  const StrainData s = assemble_strains(p, d);
  const StressData t = assemble_stresses(p, s);
  const GridOperators& ops = p.ops();
  const Grid2D& g = p.grid();

  ScalarField m11(g), m12(g), m22(g), mq1(g), mq2(g), n11(g), n12(g), n22(g);
  for (int k = 0; k < g.size(); ++k) {
    m11[k] = t.m[k](0, 0);
    m12[k] = t.m[k](0, 1);
    m22[k] = t.m[k](1, 1);
    const Eigen::Vector2d mq = t.m[k] * s.q[k];
    mq1[k] = mq(0);
    mq2[k] = mq(1);
    n11[k] = t.n[k](0, 0);
    n12[k] = t.n[k](0, 1);
    n22[k] = t.n[k](1, 1);
  }

  // <M : sym grad dw> pairs row alpha of M with the alpha component of dw.
  const ScalarField dw1 = ops.dx_adjoint(m11), dw1y = ops.dy_adjoint(m12);
  const ScalarField dw2 = ops.dx_adjoint(m12), dw2y = ops.dy_adjoint(m22);
  const ScalarField dv_a = ops.dx_adjoint(mq1), dv_b = ops.dy_adjoint(mq2);
  const ScalarField dv_c = ops.dxx_adjoint(n11), dv_d = ops.dyy_adjoint(n22);
  const ScalarField dv_e = ops.dxy_adjoint(n12);

  EnergyGradient out{Vector2Field(g), ScalarField(g)};
  for (int k = 0; k < g.size(); ++k) {
    out.dw[k] = Eigen::Vector2d(dw1[k] + dw1y[k], dw2[k] + dw2y[k]);
    out.dv[k] = dv_a[k] + dv_b[k] + dv_c[k] + dv_d[k] + 2.0 * dv_e[k];
  }
  return out;
}

std::pair<double, double> weak_residual(const PlateProblem& p, const Displacement& d,
                                        const Vector2Field& psi, const ScalarField& phi) {
  if (!(psi.grid == p.grid()) || !(phi.grid == p.grid()))
    throw std::invalid_argument("weak_residual: test field grid mismatch");
  const StrainData s = assemble_strains(p, d);
  const StressData t = assemble_stresses(p, s);
  const GridOperators& ops = p.ops();
  const Grid2D& g = p.grid();

  ScalarField psi1(g), psi2(g);
  for (int k = 0; k < g.size(); ++k) {
    psi1[k] = psi[k](0);
    psi2[k] = psi[k](1);
  }
  const ScalarField p1x = ops.dx(psi1), p1y = ops.dy(psi1);
  const ScalarField p2x = ops.dx(psi2), p2y = ops.dy(psi2);
  const Vector2Field gphi = ops.grad(phi);
  const Matrix2Field hphi = ops.hessian(phi);

  double r1 = 0.0, r2 = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    Eigen::Matrix2d grad_psi;
    grad_psi << p1x[k], p1y[k], p2x[k], p2y[k];
    r1 += t.m[k].cwiseProduct(0.5 * (grad_psi + grad_psi.transpose())).sum();
    r2 += (t.m[k] * s.q[k]).dot(gphi[k]) + t.n[k].cwiseProduct(hphi[k]).sum();
  }
  return {r1, r2};
}

std::pair<double, double> weak_residual(const PlateProblem& p, const Displacement& d,
                                        const ExprVec2& psi, const Expr& phi) {
  return weak_residual(p, d, sample(psi, p.grid()), sample(phi, p.grid()));
}

double dot(const Vector2Field& a, const Vector2Field& b) {
  double acc = 0.0;
  for (int k = 0; k < a.size(); ++k) acc += a[k].dot(b[k]);
  return acc;
}

double dot(const ScalarField& a, const ScalarField& b) {
  double acc = 0.0;
  for (int k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

}  // namespace fvk
