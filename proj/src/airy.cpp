#include "fvk/airy.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fvk {

namespace {

// Null-space parametrization of { phi : phi = dn phi = 0 on the boundary }.
// Free coefficients live on the core (2..n-3 per axis); the first interior
// layer is slaved to the second through the one-sided normal-derivative
// stencil (4 phi_1 = phi_2 after the boundary value is zeroed).
struct ClampedBasis {
  Grid2D grid;
  int core_nx, core_ny;

  explicit ClampedBasis(const Grid2D& g)
      : grid(g), core_nx(g.nx - 4), core_ny(g.ny - 4) {
    if (core_nx < 1 || core_ny < 1)
      throw std::invalid_argument("fit_clamped_airy: grid too small");
  }

  int core_size() const { return core_nx * core_ny; }

  static void axis_map(int i, int n, int& proj, double& fac) {
    if (i == 0 || i == n - 1) {
      proj = 0;
      fac = 0.0;
    } else if (i == 1) {
      proj = 2;
      fac = 0.25;
    } else if (i == n - 2) {
      proj = n - 3;
      fac = 0.25;
    } else {
      proj = i;
      fac = 1.0;
    }
  }

  ScalarField prolong(const std::vector<double>& z) const {
    ScalarField phi(grid);
    for (int j = 0; j < grid.ny; ++j) {
      int pj;
      double fj;
      axis_map(j, grid.ny, pj, fj);
      if (fj == 0.0) continue;
      for (int i = 0; i < grid.nx; ++i) {
        int pi;
        double fi;
        axis_map(i, grid.nx, pi, fi);
        if (fi == 0.0) continue;
        phi.at(i, j) = fi * fj * z[(pj - 2) * core_nx + (pi - 2)];
      }
    }
    return phi;
  }

  std::vector<double> restrict_adj(const ScalarField& f) const {
    std::vector<double> z(core_size(), 0.0);
    for (int j = 0; j < grid.ny; ++j) {
      int pj;
      double fj;
      axis_map(j, grid.ny, pj, fj);
      if (fj == 0.0) continue;
      for (int i = 0; i < grid.nx; ++i) {
        int pi;
        double fi;
        axis_map(i, grid.nx, pi, fi);
        if (fi == 0.0) continue;
        z[(pj - 2) * core_nx + (pi - 2)] += fi * fj * f.at(i, j);
      }
    }
    return z;
  }
};

struct HessianComponents {
  ScalarField xx, xy, yy;
};

HessianComponents hessian_components(const GridOperators& ops, const ScalarField& f) {
  return {ops.dxx(f), ops.dxy(f), ops.dyy(f)};
}

}  // namespace

AiryField fit_clamped_airy(const GridOperators& ops, const Matrix2Field& target, double rel_tol,
                           int max_iters) {
  const Grid2D& g = ops.grid();
  if (!(target.grid == g)) throw std::invalid_argument("fit_clamped_airy: grid mismatch");
  const ClampedBasis basis(g);
  const ScalarField wq = trapezoid_weights(g);

  ScalarField mxx(g), mxy(g), myy(g);
  for (int k = 0; k < g.size(); ++k) {
    mxx[k] = target[k](0, 0);
    mxy[k] = 0.5 * (target[k](0, 1) + target[k](1, 0));
    myy[k] = target[k](1, 1);
  }

  // Normal operator z -> P^T H^T W H P z, with the mixed component twice.
  auto apply_normal = [&](const std::vector<double>& z) {
    const ScalarField phi = basis.prolong(z);
    HessianComponents h = hessian_components(ops, phi);
    for (int k = 0; k < g.size(); ++k) {
      h.xx[k] *= wq[k];
      h.xy[k] *= 2.0 * wq[k];
      h.yy[k] *= wq[k];
    }
    ScalarField back(g);
    const ScalarField bxx = ops.dxx_adjoint(h.xx);
    const ScalarField bxy = ops.dxy_adjoint(h.xy);
    const ScalarField byy = ops.dyy_adjoint(h.yy);
    for (int k = 0; k < g.size(); ++k) back[k] = bxx[k] + bxy[k] + byy[k];
    return basis.restrict_adj(back);
  };

  std::vector<double> rhs;
  {
    ScalarField sxx(g), sxy(g), syy(g);
    for (int k = 0; k < g.size(); ++k) {
      sxx[k] = wq[k] * mxx[k];
      sxy[k] = 2.0 * wq[k] * mxy[k];
      syy[k] = wq[k] * myy[k];
    }
    ScalarField back(g);
    const ScalarField bxx = ops.dxx_adjoint(sxx);
    const ScalarField bxy = ops.dxy_adjoint(sxy);
    const ScalarField byy = ops.dyy_adjoint(syy);
    for (int k = 0; k < g.size(); ++k) back[k] = bxx[k] + bxy[k] + byy[k];
    rhs = basis.restrict_adj(back);
  }

  const int n = basis.core_size();
  auto dotv = [n](const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += a[k] * b[k];
    return acc;
  };

  std::vector<double> z(n, 0.0), r = rhs, pdir = rhs;
  const double rhs_norm = std::sqrt(dotv(rhs, rhs));
  double rr = dotv(r, r);
  int iter = 0;
  if (rhs_norm > 0.0) {
    for (; iter < max_iters; ++iter) {
      if (std::sqrt(rr) <= rel_tol * rhs_norm) break;
      const std::vector<double> ap = apply_normal(pdir);
      const double pap = dotv(pdir, ap);
      if (!(pap > 0.0)) {
        std::ostringstream os;
        os << "fit_clamped_airy: normal-equation breakdown at iteration " << iter
           << " (curvature " << pap << ")";
        throw std::runtime_error(os.str());
      }
      const double alpha = rr / pap;
      for (int k = 0; k < n; ++k) {
        z[k] += alpha * pdir[k];
        r[k] -= alpha * ap[k];
      }
      const double rr_new = dotv(r, r);
      const double beta = rr_new / rr;
      rr = rr_new;
      for (int k = 0; k < n; ++k) pdir[k] = r[k] + beta * pdir[k];
    }
    if (std::sqrt(rr) > rel_tol * rhs_norm) {
      std::ostringstream os;
      os << "fit_clamped_airy: CG did not reach tolerance " << rel_tol << " in " << max_iters
         << " iterations (relative residual " << std::sqrt(rr) / rhs_norm << ")";
      throw std::runtime_error(os.str());
    }
  }

  AiryField out{basis.prolong(z), target, 0.0, iter};
  const HessianComponents h = hessian_components(ops, out.phi);
  double misfit = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    const double exx = h.xx[k] - mxx[k];
    const double exy = h.xy[k] - mxy[k];
    const double eyy = h.yy[k] - myy[k];
    misfit += wq[k] * (exx * exx + 2.0 * exy * exy + eyy * eyy);
  }
  out.ls_residual = std::sqrt(misfit);
  return out;
}

AiryField airy_from_displacement(const PlateProblem& p, const Displacement& d) {
  const GridOperators& ops = p.ops();
  const Grid2D& g = p.grid();

  ScalarField w1(g), w2(g);
  for (int k = 0; k < g.size(); ++k) {
    w1[k] = d.w[k](0);
    w2[k] = d.w[k](1);
  }
  const ScalarField w1x = ops.dx(w1), w1y = ops.dy(w1);
  const ScalarField w2x = ops.dx(w2), w2y = ops.dy(w2);
  const Vector2Field gv = ops.grad(d.v);

  Matrix2Field target(g);
  for (int k = 0; k < g.size(); ++k) {
    Eigen::Matrix2d grad_w;
    grad_w << w1x[k], w1y[k], w2x[k], w2y[k];
    const Eigen::Matrix2d mixed = gv[k] * p.grad_g_diff()[k].transpose();
    const Eigen::Matrix2d psi = 0.5 * gv[k] * gv[k].transpose() - p.sym_eps_2x2()[k] +
                                0.25 * (mixed + mixed.transpose()) - 0.5 * p.sym_kappa_2x2()[k];
    const Eigen::Matrix2d arg = 0.5 * (grad_w + grad_w.transpose()) + psi;
    const Eigen::Matrix2d stress = p.g_sum()[k] * l2_matrix(arg, p.material());
    target[k] = cof2(stress);  // inverts cof(hess phi) = stress
  }
  return fit_clamped_airy(ops, target);
}

ScalarField gauss_curvature(const GridOperators& ops, const ScalarField& v) {
  const Matrix2Field h = ops.hessian(v);
  ScalarField out(v.grid);
  for (int k = 0; k < out.size(); ++k) out[k] = h[k].determinant();
  return out;
}

ScalarField lambda_g(const PlateProblem& p, const ScalarField& v) {
  const Vector2Field gv = p.ops().grad(v);
  Matrix2Field arg(p.grid());
  for (int k = 0; k < arg.size(); ++k)
    arg[k] = p.sym_eps_2x2()[k] - 0.5 * p.g_diff()[k] * p.sym_kappa_2x2()[k] +
             0.5 * gv[k] * p.grad_g_diff()[k].transpose();
  return curl_t_curl(p.ops(), arg);
}

ScalarField zeta(const PlateProblem& p, const ScalarField& phi) {
  const Expr f = 1.0 / (p.thickness().g1 + p.thickness().g2);
  const Grid2D& g = p.grid();
  const Vector2Field grad_f = sample(grad(f), g);
  const Matrix2Field hess_f = sample(hessian(f), g);
  const ScalarField lap_f = sample(laplacian_expr(f), g);

  const GridOperators& ops = p.ops();
  const ScalarField lap_phi = ops.laplacian(phi);
  const Vector2Field grad_lap = ops.grad(lap_phi);
  const Matrix2Field hess_phi = ops.hessian(phi);

  const double s_over_2mu = p.material().young_modulus() / (2.0 * p.material().mu);
  const double nu = p.material().poisson_ratio();

  ScalarField out(g);
  for (int k = 0; k < g.size(); ++k)
    out[k] = 2.0 * grad_f[k].dot(grad_lap[k]) +
             s_over_2mu * hess_f[k].cwiseProduct(hess_phi[k]).sum() - nu * lap_f[k] * lap_phi[k];
  return out;
}

ScalarField eta(const PlateProblem& p, const ScalarField& v) {
  const Expr g3 = pow(p.thickness().g1 + p.thickness().g2, 3);
  const Grid2D& g = p.grid();
  const Vector2Field grad_g3 = sample(grad(g3), g);
  const Matrix2Field hess_g3 = sample(hessian(g3), g);

  const GridOperators& ops = p.ops();
  const ScalarField vx = ops.dx(v), vy = ops.dy(v);
  const ScalarField div_hess_1 = ops.laplacian(vx);
  const ScalarField div_hess_2 = ops.laplacian(vy);
  const Matrix2Field hess_v = ops.hessian(v);

  const double nu = p.material().poisson_ratio();
  ScalarField out(g);
  for (int k = 0; k < g.size(); ++k) {
    const Eigen::Vector2d div_hess(div_hess_1[k], div_hess_2[k]);
    const Eigen::Matrix2d inner = hess_v[k] + nu * cof2(hess_v[k]);
    out[k] = grad_g3[k].dot(div_hess) + hess_g3[k].cwiseProduct(inner).sum();
  }
  return out;
}

ScalarField xi(const PlateProblem& p, const ScalarField& phi) {
  const Expr diff = p.thickness().g2 - p.thickness().g1;
  const Expr sum = p.thickness().g1 + p.thickness().g2;
  const Grid2D& g = p.grid();
  const Matrix2Field hess_diff = sample(hessian(diff), g);
  const Vector2Field grad_sum = sample(grad(sum), g);

  const Matrix2Field hess_phi = p.ops().hessian(phi);
  ScalarField out(g);
  for (int k = 0; k < g.size(); ++k) {
    const double bracket = hess_phi[k].cwiseProduct(cof2(hess_diff[k])).sum();
    out[k] = p.g_sum()[k] * bracket +
             grad_sum[k].dot(cof2(hess_phi[k]) * p.grad_g_diff()[k]);
  }
  return out;
}

ScalarField omega_g(const PlateProblem& p) {
  const Expr g3 = pow(p.thickness().g1 + p.thickness().g2, 3);
  const Grid2D& g = p.grid();
  const Vector2Field grad_g3 = sample(grad(g3), g);
  const Matrix2Field hess_g3 = sample(hessian(g3), g);

  const ExprMat2 k2 = block_2x2(sym3(p.growth().kappa));
  const ExprVec2 div_k{k2[0].deriv(0) + k2[1].deriv(1), k2[2].deriv(0) + k2[3].deriv(1)};
  const Vector2Field div_k_s = sample(div_k, g);

  const double nu = p.material().poisson_ratio();
  ScalarField out(g);
  for (int k = 0; k < g.size(); ++k) {
    const Eigen::Matrix2d kk = p.sym_kappa_2x2()[k];
    out[k] = hess_g3[k].cwiseProduct(kk + nu * cof2(kk)).sum() + grad_g3[k].dot(div_k_s[k]);
  }
  return out;
}

ElResiduals el_residuals(const PlateProblem& p, const Displacement& d, const AiryField& airy) {
  const GridOperators& ops = p.ops();
  const Grid2D& g = p.grid();
  const double s_mod = p.material().young_modulus();
  const double b_mod = p.material().bending_stiffness();

  // All derivatives of the potential come from the pointwise-inverted
  // Hessian target, a smooth field; the least-squares phi itself is needed
  // only for the clamped boundary line. This keeps the residual free of
  // the fit misfit, which the fourth-order stencils would amplify.
  const Matrix2Field& hess_phi = airy.target;
  ScalarField lap_phi(g);
  for (int k = 0; k < g.size(); ++k) lap_phi[k] = hess_phi[k].trace();
  const ScalarField bi_phi = ops.laplacian(lap_phi);

  // zeta evaluated on the target Hessian.
  const Expr inv_sum = 1.0 / (p.thickness().g1 + p.thickness().g2);
  const Vector2Field grad_f = sample(grad(inv_sum), g);
  const Matrix2Field hess_f = sample(hessian(inv_sum), g);
  const ScalarField lap_f = sample(laplacian_expr(inv_sum), g);
  const Vector2Field grad_lap_phi = ops.grad(lap_phi);
  const double s_over_2mu = s_mod / (2.0 * p.material().mu);
  const double nu = p.material().poisson_ratio();

  const ScalarField kg = gauss_curvature(ops, d.v);
  const ScalarField lg = lambda_g(p, d.v);

  const ScalarField bi_v = ops.biharmonic(d.v);
  const Matrix2Field hess_v = ops.hessian(d.v);
  const Vector2Field gv = ops.grad(d.v);
  const Vector2Field grad_sum = sample(grad(p.thickness().g1 + p.thickness().g2), g);
  const Matrix2Field hess_diff = sample(hessian(p.thickness().g2 - p.thickness().g1), g);
  const ScalarField og = omega_g(p);
  const ScalarField eta_v = eta(p, d.v);

  ElResiduals out{ScalarField(g), ScalarField(g), 2};
  for (int j = out.margin; j < g.ny - out.margin; ++j)
    for (int i = out.margin; i < g.nx - out.margin; ++i) {
      const int k = g.idx(i, j);
      const double zeta_phi = 2.0 * grad_f[k].dot(grad_lap_phi[k]) +
                              s_over_2mu * hess_f[k].cwiseProduct(hess_phi[k]).sum() -
                              nu * lap_f[k] * lap_phi[k];
      out.r1[k] = bi_phi[k] / p.g_sum()[k] + zeta_phi + s_mod * (kg[k] + lg[k]);

      const double bracket_pv = hess_phi[k].cwiseProduct(cof2(hess_v[k])).sum();
      const double bracket_pd = hess_phi[k].cwiseProduct(cof2(hess_diff[k])).sum();
      const double xi_phi = p.g_sum()[k] * bracket_pd +
                            grad_sum[k].dot(cof2(hess_phi[k]) * p.grad_g_diff()[k]);
      out.r2[k] = b_mod * p.g_sum_cubed()[k] * bi_v[k] - p.g_sum()[k] * bracket_pv -
                  grad_sum[k].dot(cof2(hess_phi[k]) * gv[k]) + b_mod * og[k] + b_mod * eta_v[k] -
                  0.5 * xi_phi;
    }
  return out;
}

ElResiduals el_residuals(const PlateProblem& p, const Displacement& d) {
  return el_residuals(p, d, airy_from_displacement(p, d));
}

BoundaryResiduals boundary_residuals(const PlateProblem& p, const Displacement& d,
                                     const AiryField& airy) {
  const GridOperators& ops = p.ops();
  const Grid2D& g = p.grid();
  const double nu = p.material().poisson_ratio();

  const Vector2Field grad_phi = ops.grad(airy.phi);
  const Matrix2Field hess_v = ops.hessian(d.v);
  Matrix2Field psi_t(g);
  for (int k = 0; k < g.size(); ++k) psi_t[k] = hess_v[k] + p.sym_kappa_2x2()[k];

  // div((g1+g2)^3 (Psi~ + nu cof Psi~)), row-wise.
  ScalarField b11(g), b12(g), b21(g), b22(g);
  for (int k = 0; k < g.size(); ++k) {
    const Eigen::Matrix2d bt = p.g_sum_cubed()[k] * (psi_t[k] + nu * cof2(psi_t[k]));
    b11[k] = bt(0, 0);
    b12[k] = bt(0, 1);
    b21[k] = bt(1, 0);
    b22[k] = bt(1, 1);
  }
  const ScalarField div1_a = ops.dx(b11), div1_b = ops.dy(b12);
  const ScalarField div2_a = ops.dx(b21), div2_b = ops.dy(b22);

  struct Edge {
    Eigen::Vector2d n, tau;
    bool vertical;  // tangential derivative along y
    int fixed;      // fixed index on that edge
  };
  const Edge edges[4] = {
      {{-1.0, 0.0}, {0.0, 1.0}, true, 0},
      {{1.0, 0.0}, {0.0, 1.0}, true, g.nx - 1},
      {{0.0, -1.0}, {1.0, 0.0}, false, 0},
      {{0.0, 1.0}, {1.0, 0.0}, false, g.ny - 1},
  };

  BoundaryResiduals out{0.0, 0.0, 0.0};
  for (const Edge& e : edges) {
    // Scalar line field (g1+g2)^3 <Psi~ : n x tau> over the whole grid,
    // differentiated tangentially with the grid stencils.
    ScalarField line(g);
    for (int k = 0; k < g.size(); ++k)
      line[k] = p.g_sum_cubed()[k] * e.n.dot(psi_t[k] * e.tau);
    const ScalarField dtau_line = e.vertical ? ops.dy(line) : ops.dx(line);

    const int count = e.vertical ? g.ny : g.nx;
    for (int t = 1; t < count - 1; ++t) {  // corners excluded
      const int i = e.vertical ? e.fixed : t;
      const int j = e.vertical ? t : e.fixed;
      const int k = g.idx(i, j);
      const double phi_val = std::abs(airy.phi[k]);
      const double dn_phi = std::abs(grad_phi[k].dot(e.n));
      out.b1 = std::max(out.b1, std::max(phi_val, dn_phi));

      const double line2 = e.n.dot(psi_t[k] * e.n) + nu * e.tau.dot(psi_t[k] * e.tau);
      out.b2 = std::max(out.b2, std::abs(line2));

      const Eigen::Vector2d divb(div1_a[k] + div1_b[k], div2_a[k] + div2_b[k]);
      const double line3 = (1.0 - nu) * dtau_line[k] + divb.dot(e.n);
      out.b3 = std::max(out.b3, std::abs(line3));
    }
  }
  return out;
}

BoundaryResiduals boundary_residuals(const PlateProblem& p, const Displacement& d) {
  return boundary_residuals(p, d, airy_from_displacement(p, d));
}

}  // namespace fvk
