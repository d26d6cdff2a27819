#include "fvk/gamma.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "fvk/limit_energy.hpp"

namespace fvk {

namespace {

ExprVec3 cross(const ExprVec3& a, const ExprVec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

ExprVec3 c_map_expr(const ExprMat2& f, const LameMaterial& mat) {
  const double factor = -mat.lambda / (2.0 * mat.mu + mat.lambda);
  return {Expr(), Expr(), Expr::constant(factor) * trace(f)};
}

ExprVec3 l_map_expr(const ExprMat3& f) {
  return {f[2] + f[6], f[5] + f[7], f[8]};
}

// The full stretching-strain argument as closed-form expressions.
ExprMat2 stretching_strain_expr(const PlateProblem& p, const AnalyticDisplacement& d) {
  const ExprVec2 gv = grad(d.v);
  const Expr diff = p.thickness().g2 - p.thickness().g1;
  const ExprMat2 grad_w{d.w[0].deriv(0), d.w[0].deriv(1), d.w[1].deriv(0), d.w[1].deriv(1)};
  const ExprMat2 sym_eps = block_2x2(sym3(p.growth().eps));
  const ExprMat2 sym_kappa = block_2x2(sym3(p.growth().kappa));

  ExprMat2 e = sym(grad_w);
  e = add(e, scale(Expr::constant(0.5), outer(gv, gv)));
  e = sub(e, sym_eps);
  e = sub(e, scale(Expr::constant(0.5) * diff, sym_kappa));
  e = add(e, scale(Expr::constant(0.5), sym(outer(gv, grad(diff)))));
  return e;
}

ExprMat2 bending_negative_expr(const PlateProblem& p, const AnalyticDisplacement& d) {
  const ExprMat2 hv = hessian(d.v);
  const ExprMat2 sym_kappa = block_2x2(sym3(p.growth().kappa));
  ExprMat2 out;
  for (int k = 0; k < 4; ++k) out[k] = -(hv[k] + sym_kappa[k]);
  return out;
}

}  // namespace

Eigen::Matrix3d growth_tensor_at(const PlateProblem& p, double h, double x1, double x2,
                                 double x3) {
  if (!(h > 0.0)) throw std::invalid_argument("growth_tensor_at: h must be positive");
  Eigen::Matrix3d eps, kappa;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      eps(r, c) = p.growth().eps[3 * r + c].eval(x1, x2);
      kappa(r, c) = p.growth().kappa[3 * r + c].eval(x1, x2);
    }
  const Eigen::Matrix3d a = Eigen::Matrix3d::Identity() + h * h * eps + h * x3 * kappa;
  if (!(a.determinant() > 0.0))
    throw std::runtime_error("growth_tensor_at: det a^h <= 0 (h too large for this prestrain)");
  return a;
}

double s_map(const PlateProblem& p, double h, double x1, double x2, double t) {
  if (t < -0.5 || t > 0.5) throw std::invalid_argument("s_map: t must lie in [-1/2, 1/2]");
  const double g1 = p.thickness().g1.eval(x1, x2);
  const double g2 = p.thickness().g2.eval(x1, x2);
  return h * (g1 + g2) * t + 0.5 * h * (g2 - g1);
}

QuadRule gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_unit: need at least one point");
  QuadRule rule;
  rule.node.resize(n);
  rule.weight.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n over [-1, 1].
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = (n == 1) ? x : p1;
      const double pn1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.node[i] = 0.5 * x;
    rule.weight[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

RecoveryDeformation::RecoveryDeformation(const PlateProblem& p, const AnalyticDisplacement& d,
                                         double h)
    : h_(h), tape_(std::span<const Expr>{}) {
  if (!(h > 0.0)) throw std::invalid_argument("RecoveryDeformation: h must be positive");

  const Expr diff = p.thickness().g2 - p.thickness().g1;
  const ExprVec2 gv = grad(d.v);
  const ExprMat2 strain = stretching_strain_expr(p, d);
  const ExprMat2 bneg = bending_negative_expr(p, d);
  const LameMaterial& mat = p.material();

  const ExprVec3 c_bneg = c_map_expr(bneg, mat);
  d0_ = add3(l_map_expr(p.growth().eps),
             add3(c_map_expr(strain, mat), scale3(Expr::constant(-0.5) * diff, c_bneg)));
  d1_ = add3(l_map_expr(p.growth().kappa), c_bneg);
  // Vertical-stretch correction: the tilt -h x3 grad v stretches the fiber
  // by |grad v|^2/2 at second order, which must come off the x3-linear
  // vertical coefficient for the strain to hit the relaxed completion.
  d0_[2] = d0_[2] - Expr::constant(0.5) * (gv[0] * gv[0] + gv[1] * gv[1]);

  const Expr hh = Expr::constant(h);
  const Expr h2 = Expr::constant(h * h);
  const Expr half_h2_diff = Expr::constant(0.5 * h * h) * diff;

  // u = a0 + a1 x3 + a2 x3^2 in physical coordinates.
  const ExprVec3 a0{Expr::x1() + h2 * d.w[0] + half_h2_diff * gv[0],
                    Expr::x2() + h2 * d.w[1] + half_h2_diff * gv[1], hh * d.v};
  const ExprVec3 a1{-hh * gv[0] + h2 * d0_[0], -hh * gv[1] + h2 * d0_[1],
                    Expr::constant(1.0) + h2 * d0_[2]};
  const ExprVec3 a2{Expr::constant(0.5 * h) * d1_[0], Expr::constant(0.5 * h) * d1_[1],
                    Expr::constant(0.5 * h) * d1_[2]};

  outputs_.clear();
  outputs_.reserve(47);
  for (const ExprVec3* coeff : {&a0, &a1, &a2}) {
    for (int c = 0; c < 3; ++c) outputs_.push_back((*coeff)[c]);
    for (int c = 0; c < 3; ++c) outputs_.push_back((*coeff)[c].deriv(0));
    for (int c = 0; c < 3; ++c) outputs_.push_back((*coeff)[c].deriv(1));
  }
  for (int k = 0; k < 9; ++k) outputs_.push_back(p.growth().eps[k]);
  for (int k = 0; k < 9; ++k) outputs_.push_back(p.growth().kappa[k]);
  outputs_.push_back(p.thickness().g1);
  outputs_.push_back(p.thickness().g2);
  tape_ = ExprTape(outputs_);
}

RecoveryDeformation::InPlanePoint RecoveryDeformation::eval_inplane(double x1, double x2) const {
  double vals[47];
  tape_.eval(x1, x2, std::span<double>(vals, 47));
  InPlanePoint q;
  Eigen::Vector3d* coeff[3] = {&q.a0, &q.a1, &q.a2};
  Eigen::Matrix<double, 3, 2>* jac[3] = {&q.j0, &q.j1, &q.j2};
  for (int b = 0; b < 3; ++b) {
    const double* base = vals + 9 * b;
    for (int c = 0; c < 3; ++c) {
      (*coeff[b])(c) = base[c];
      (*jac[b])(c, 0) = base[3 + c];
      (*jac[b])(c, 1) = base[6 + c];
    }
  }
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      q.eps(r, c) = vals[27 + 3 * r + c];
      q.kappa(r, c) = vals[36 + 3 * r + c];
    }
  q.g1 = vals[45];
  q.g2 = vals[46];
  return q;
}

Eigen::Vector3d RecoveryDeformation::value_at(const InPlanePoint& q, double x3) const {
  return rotation_ * (q.a0 + x3 * q.a1 + x3 * x3 * q.a2);
}

Eigen::Matrix3d RecoveryDeformation::jacobian_at(const InPlanePoint& q, double x3) const {
  Eigen::Matrix3d j;
  j.leftCols<2>() = q.j0 + x3 * q.j1 + x3 * x3 * q.j2;
  j.col(2) = q.a1 + 2.0 * x3 * q.a2;
  return rotation_ * j;
}

Eigen::Vector3d RecoveryDeformation::value(double x1, double x2, double x3) const {
  return value_at(eval_inplane(x1, x2), x3);
}

Eigen::Matrix3d RecoveryDeformation::jacobian(double x1, double x2, double x3) const {
  return jacobian_at(eval_inplane(x1, x2), x3);
}

double energy_3d(const PlateProblem& p, const RecoveryDeformation& u, int n_inplane,
                 int n_thickness, int threads) {
  if (n_inplane < 2 || n_thickness < 2)
    throw std::invalid_argument("energy_3d: quadrature orders must be at least 2");
  if (threads < 1) throw std::invalid_argument("energy_3d: threads must be positive");

  const Grid2D& box = p.grid();
  const double hx = (box.x_max - box.x_min) / (n_inplane - 1);
  const double hy = (box.y_max - box.y_min) / (n_inplane - 1);
  const QuadRule rule = gauss_legendre_unit(n_thickness);
  const double h = u.h();
  const LameMaterial mat = p.material();

  const int nblocks = std::min(threads, n_inplane);
  std::vector<double> partial(nblocks, 0.0);
  std::vector<std::string> errors(nblocks);

  auto run_block = [&](int block) {
    RecoveryDeformation local = u;  // private tape scratch
    const int j_begin = block * n_inplane / nblocks;
    const int j_end = (block + 1) * n_inplane / nblocks;
    double acc = 0.0;
    try {
      for (int j = j_begin; j < j_end; ++j) {
        const double wy = (j == 0 || j == n_inplane - 1) ? 0.5 * hy : hy;
        const double x2 = box.y_min + j * hy;
        for (int i = 0; i < n_inplane; ++i) {
          const double wx = (i == 0 || i == n_inplane - 1) ? 0.5 * hx : hx;
          const double x1 = box.x_min + i * hx;
          const auto q = local.eval_inplane(x1, x2);
          const double gsum = q.g1 + q.g2;
          const double gdiff = q.g2 - q.g1;
          double column = 0.0;
          for (int t = 0; t < n_thickness; ++t) {
            const double x3 = h * gsum * rule.node[t] + 0.5 * h * gdiff;
            const Eigen::Matrix3d a =
                Eigen::Matrix3d::Identity() + h * h * q.eps + h * x3 * q.kappa;
            if (!(a.determinant() > 0.0))
              throw std::runtime_error("energy_3d: det a^h <= 0 along the quadrature");
            const Eigen::Matrix3d f = local.jacobian_at(q, x3) * a.inverse();
            column += rule.weight[t] * density_W(f, mat);
          }
          acc += wx * wy * gsum * column;
        }
      }
    } catch (const std::exception& err) {
      errors[block] = err.what();
    }
    partial[block] = acc;
  };

  if (nblocks == 1) {
    run_block(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nblocks);
    for (int b = 0; b < nblocks; ++b) pool.emplace_back(run_block, b);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);

  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

GammaStudy gamma_study(const PlateProblem& p, const AnalyticDisplacement& d,
                       const std::vector<double>& h_list, const GammaOptions& opts) {
  if (h_list.empty()) throw std::invalid_argument("gamma_study: empty h list");
  for (std::size_t k = 0; k + 1 < h_list.size(); ++k)
    if (!(h_list[k] > h_list[k + 1]))
      throw std::invalid_argument("gamma_study: h list must be strictly decreasing");
  for (double h : h_list)
    if (!(h > 0.0)) throw std::invalid_argument("gamma_study: h must be positive");

  GammaStudy study;
  study.h = h_list;

  // Reference limit energy from the sampled displacement on a fine grid.
  const Grid2D& box = p.grid();
  const Grid2D ref_grid(box.x_min, box.x_max, box.y_min, box.y_max, opts.n_reference,
                        opts.n_reference);
  PlateProblem ref(ref_grid, p.material(), p.thickness(), p.growth());
  Displacement dis(ref_grid);
  dis.w = sample(d.w, ref_grid);
  dis.v = sample(d.v, ref_grid);
  study.reference_Ig = energy_Ig(ref, dis);

  const double denom = std::max(std::abs(study.reference_Ig), 1e-300);
  for (double h : h_list) {
    const RecoveryDeformation rec(p, d, h);
    const double e = energy_3d(p, rec, opts.n_inplane, opts.n_thickness, opts.threads) /
                     (h * h * h * h);
    study.scaled_energy.push_back(e);
    study.rel_gap.push_back(std::abs(e - study.reference_Ig) / denom);
  }

  const std::size_t n = h_list.size();
  if (n >= 2) {
    const double h1 = h_list[n - 2], h2 = h_list[n - 1];
    const double e1 = study.scaled_energy[n - 2], e2 = study.scaled_energy[n - 1];
    study.extrapolated = e2 + (e2 - e1) * h2 / (h1 - h2);
  } else {
    study.extrapolated = study.scaled_energy.back();
  }
  study.extrapolated_gap = std::abs(study.extrapolated - study.reference_Ig) / denom;
  return study;
}

void write_gamma_csv(const std::string& path, const GammaStudy& study) {
  std::ofstream os(path);
  if (!os) throw IoError("write_gamma_csv: cannot open " + path);
  os << "h,scaled_energy,rel_gap_to_Ig\n";
  for (std::size_t k = 0; k < study.h.size(); ++k)
    os << format_double(study.h[k]) << "," << format_double(study.scaled_energy[k]) << ","
       << format_double(study.rel_gap[k]) << "\n";
  os << "# extrapolated," << format_double(study.extrapolated) << ",rel_gap,"
     << format_double(study.extrapolated_gap) << ",reference_Ig,"
     << format_double(study.reference_Ig) << "\n";
  if (!os) throw IoError("write_gamma_csv: write failed for " + path);
}

MidsurfaceGaps midsurface_forms(const PlateProblem& p, const AnalyticDisplacement& d, double h,
                                const Eigen::Vector2d& x, const Eigen::Vector2d& tau,
                                const Eigen::Vector2d& eta) {
  const Expr diff = p.thickness().g2 - p.thickness().g1;
  const Expr hh2 = Expr::constant(h * h);
  const Expr half_h_diff = Expr::constant(0.5 * h) * diff;

  const ExprVec3 phi_mid{Expr::x1(), Expr::x2(), half_h_diff};
  const ExprVec3 phi_def{Expr::x1() + hh2 * d.w[0], Expr::x2() + hh2 * d.w[1],
                         half_h_diff + Expr::constant(h) * d.v};

  auto jac_cols = [](const ExprVec3& f) {
    std::array<ExprVec3, 2> cols;
    for (int axis = 0; axis < 2; ++axis)
      cols[axis] = {f[0].deriv(axis), f[1].deriv(axis), f[2].deriv(axis)};
    return cols;
  };
  const auto jt = jac_cols(phi_mid);
  const auto jd = jac_cols(phi_def);
  const ExprVec3 n_mid = cross(jt[0], jt[1]);
  const ExprVec3 n_def = cross(jd[0], jd[1]);

  auto eval_vec = [&](const ExprVec3& f) {
    return Eigen::Vector3d(f[0].eval(x(0), x(1)), f[1].eval(x(0), x(1)), f[2].eval(x(0), x(1)));
  };
  auto dir_deriv = [&](const ExprVec3& f, const Eigen::Vector2d& dir) {
    Eigen::Vector3d out = Eigen::Vector3d::Zero();
    for (int axis = 0; axis < 2; ++axis)
      out += dir(axis) * Eigen::Vector3d(f[0].deriv(axis).eval(x(0), x(1)),
                                         f[1].deriv(axis).eval(x(0), x(1)),
                                         f[2].deriv(axis).eval(x(0), x(1)));
    return out;
  };
  // d_dir (n/|n|) = (d_dir n)/|n| - n (n . d_dir n)/|n|^3, evaluated pointwise.
  auto unit_normal_deriv = [&](const ExprVec3& n, const Eigen::Vector2d& dir) {
    const Eigen::Vector3d nv = eval_vec(n);
    const Eigen::Vector3d dn = dir_deriv(n, dir);
    const double len = nv.norm();
    return (dn / len - nv * (nv.dot(dn)) / (len * len * len)).eval();
  };

  const double g1v = p.thickness().g1.eval(x(0), x(1));
  const double g2v = p.thickness().g2.eval(x(0), x(1));
  Eigen::Matrix3d eps, kappa;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      eps(r, c) = p.growth().eps[3 * r + c].eval(x(0), x(1));
      kappa(r, c) = p.growth().kappa[3 * r + c].eval(x(0), x(1));
    }
  const double x3_mid = 0.5 * h * (g2v - g1v);
  const Eigen::Matrix3d a_mid = Eigen::Matrix3d::Identity() + h * h * eps + h * x3_mid * kappa;

  const Eigen::Vector3d dtau_def = dir_deriv(phi_def, tau);
  const Eigen::Vector3d deta_def = dir_deriv(phi_def, eta);
  const Eigen::Vector3d dtau_mid = dir_deriv(phi_mid, tau);
  const Eigen::Vector3d deta_mid = dir_deriv(phi_mid, eta);

  // First form: |d_tau phi1|^2 - |a^h d_tau phi~|^2 = 2 h^2 tau' e tau + O(h^3).
  const ExprMat2 strain = stretching_strain_expr(p, d);
  Eigen::Matrix2d strain_v;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) strain_v(r, c) = strain[2 * r + c].eval(x(0), x(1));
  const double first_quantity =
      dtau_def.squaredNorm() - (a_mid * dtau_mid).squaredNorm();
  const double first_gap = first_quantity - 2.0 * h * h * tau.dot(strain_v * tau);

  // Second form: the shape-operator difference against the growth metric.
  const Eigen::Vector3d dtau_unit_def = unit_normal_deriv(n_def, tau);
  const Eigen::Vector3d dtau_unit_mid = unit_normal_deriv(n_mid, tau);
  const Eigen::Matrix3d half_d3_g = h * 0.5 * (kappa.transpose() * a_mid + a_mid.transpose() * kappa);
  const double second_quantity = dtau_unit_def.dot(deta_def) -
                                 (half_d3_g * dtau_mid).dot(deta_mid) -
                                 dtau_unit_mid.dot(deta_mid);

  const ExprMat2 hv = hessian(d.v);
  const ExprMat2 sym_kappa = block_2x2(sym3(p.growth().kappa));
  Eigen::Matrix2d bend_v;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      bend_v(r, c) = hv[2 * r + c].eval(x(0), x(1)) + sym_kappa[2 * r + c].eval(x(0), x(1));
  const double second_gap = second_quantity + h * tau.dot(bend_v * eta);

  return MidsurfaceGaps{first_gap, second_gap};
}

}  // namespace fvk
