// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Tolerances are fixed here, not configurable.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fvk/airy.hpp"
#include "fvk/gamma.hpp"
#include "fvk/solver.hpp"
#include "test_util.hpp"

using namespace fvk;
using testutil::Rng;

namespace {

const LameMaterial kUnit(1.0, 1.0);
const double kPi = 3.14159265358979323846;

struct Criterion {
  std::string label;
  std::function<bool(std::string&)> run;
};

double max_abs(const ScalarField& f) {
  double m = 0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

Displacement random_nodal(const Grid2D& g, Rng& rng, double amp) {
  Displacement d(g);
  for (auto& v : d.w.values) v = Eigen::Vector2d(rng.uniform(-amp, amp), rng.uniform(-amp, amp));
  for (auto& v : d.v.values) v = rng.uniform(-amp, amp);
  return d;
}

PlateProblem generic_problem(int n) {
  ThicknessPair thick{0.4 + 0.1 * Expr::x2(), 0.5 + 0.2 * Expr::x1()};
  GrowthTensor growth;
  growth.eps[0] = 0.3 * Expr::x1();
  growth.eps[4] = Expr::constant(-0.2);
  growth.eps[1] = 0.1 * Expr::x1() * Expr::x2();
  growth.kappa[0] = Expr::constant(0.5);
  growth.kappa[4] = 0.2 * Expr::x1();
  return PlateProblem(Grid2D(0, 1, 0, 1, n, n), kUnit, thick, growth);
}

// ---------------------------------------------------------------------------

bool criterion_q2_equivalence(std::string& note) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  double worst = 0.0;
  for (int m = 0; m < 10; ++m) {
    const LameMaterial mat(rng.uniform(0.2, 5.0), rng.uniform(0.0, 5.0));
    for (int t = 0; t < 10000; ++t) {
      const Eigen::Matrix2d f = rng.matrix2(2.0);
      const double closed = q2_closed(f, mat);
      const double mini = q2_minimized(f, mat).value;
      worst = std::max(worst, std::abs(mini - closed) / (1.0 + closed));
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max rel err %.2e over 1e5 samples, %.2f s", worst, seconds);
  note = buf;
  return worst <= 1e-10 && seconds < 5.0;
}

bool criterion_hessian_identity(std::string& note) {
  Rng rng(1002);
  const double h = 1e-4;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const LameMaterial mat(rng.uniform(0.2, 5.0), rng.uniform(0.0, 5.0));
    const Eigen::Matrix3d a = rng.matrix3();
    const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
    const double fd = (density_W(id + h * a, mat) + density_W(id - h * a, mat)) / (h * h);
    const double exact = q3(a, mat);
    worst = std::max(worst, std::abs(fd - exact) / (1.0 + std::abs(exact)));
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max rel err %.2e over 100 directions", worst);
  note = buf;
  return worst <= 1e-6;
}

bool criterion_gradient_consistency(std::string& note) {
  PlateProblem p = generic_problem(33);
  Rng rng(1003);
  const Displacement d = random_nodal(p.grid(), rng, 0.3);
  const EnergyGradient grad = grad_Ig(p, d);
  const double t = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Displacement delta = random_nodal(p.grid(), rng, 1.0);
    Displacement plus = d, minus = d;
    for (int k = 0; k < p.grid().size(); ++k) {
      plus.w[k] += t * delta.w[k];
      plus.v[k] += t * delta.v[k];
      minus.w[k] -= t * delta.w[k];
      minus.v[k] -= t * delta.v[k];
    }
    const double fd = (energy_Ig(p, plus) - energy_Ig(p, minus)) / (2.0 * t);
    const double an = dot(grad.dw, delta.w) + dot(grad.dv, delta.v);
    worst = std::max(worst, std::abs(fd - an) / (1.0 + std::abs(an)));
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max rel err %.2e over 50 directions on 33x33", worst);
  note = buf;
  return worst <= 1e-6;
}

bool criterion_hand_energies(std::string& note) {
  const Grid2D g(0, 1, 0, 1, 33, 33);
  PlateProblem p(g, kUnit, ThicknessPair{}, GrowthTensor{});
  Displacement d(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) d.v.at(i, j) = g.x(i);
  const double stretch_err = std::abs(energy_Ig(p, d) - 1.0 / 3.0);

  GrowthTensor growth;
  for (int i = 0; i < 3; ++i) growth.kappa[4 * i] = Expr::constant(1.0);
  PlateProblem pk(g, kUnit, ThicknessPair{}, growth);
  const double bend_err = std::abs(energy_Ig(pk, Displacement(g)) - 5.0 / 18.0);

  char buf[96];
  std::snprintf(buf, sizeof(buf), "|Ig-1/3| = %.2e, |Ig-5/18| = %.2e", stretch_err, bend_err);
  note = buf;
  return stretch_err <= 1e-12 && bend_err <= 1e-12;
}

bool criterion_uniform_reduction(std::string& note) {
  const Grid2D g(0, 1, 0, 1, 17, 17);
  GrowthTensor growth;
  growth.eps[0] = 0.2 * Expr::x1();
  growth.eps[4] = 0.1 * Expr::x2();
  growth.eps[1] = Expr::constant(0.05);
  growth.kappa[0] = Expr::constant(0.4);
  growth.kappa[4] = 0.2 * Expr::x1();
  PlateProblem p(g, kUnit, ThicknessPair{}, growth);
  Rng rng(1005);
  const Displacement d = random_nodal(g, rng, 0.3);

  // Independent constant-thickness assembly (total thickness one).
  const GridOperators& ops = p.ops();
  ScalarField w1(g), w2(g);
  for (int k = 0; k < g.size(); ++k) {
    w1[k] = d.w[k](0);
    w2[k] = d.w[k](1);
  }
  const ScalarField w1x = ops.dx(w1), w1y = ops.dy(w1);
  const ScalarField w2x = ops.dx(w2), w2y = ops.dy(w2);
  const Vector2Field gv = ops.grad(d.v);
  const Matrix2Field hv = ops.hessian(d.v);
  double expected = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int k = g.idx(i, j);
      Eigen::Matrix2d grad_w;
      grad_w << w1x[k], w1y[k], w2x[k], w2y[k];
      const Eigen::Matrix2d stretch = 0.5 * (grad_w + grad_w.transpose()) +
                                      0.5 * gv[k] * gv[k].transpose() - p.sym_eps_2x2()[k];
      const Eigen::Matrix2d bend = hv[k] + p.sym_kappa_2x2()[k];
      expected += trapezoid_weight(g, i, j) *
                  (0.5 * q2_closed(stretch, kUnit) + q2_closed(bend, kUnit) / 24.0);
    }
  const double energy_gap = std::abs(energy_Ig(p, d) - expected) / (1.0 + expected);

  // The variable-thickness auxiliaries collapse identically.
  ScalarField probe(g);
  for (double& v : probe.values) v = rng.uniform(-1, 1);
  const double aux = std::max({max_abs(zeta(p, probe)), max_abs(eta(p, probe)),
                               max_abs(xi(p, probe)), max_abs(omega_g(p))});

  // Weak forms against an independent uniform assembly.
  double weak_gap = 0.0;
  Rng wrng(1006);
  for (int trial = 0; trial < 5; ++trial) {
    Vector2Field psi(g);
    ScalarField phi(g);
    for (auto& v : psi.values) v = Eigen::Vector2d(wrng.uniform(-1, 1), wrng.uniform(-1, 1));
    for (auto& v : phi.values) v = wrng.uniform(-1, 1);
    const auto got = weak_residual(p, d, psi, phi);

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
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int k = g.idx(i, j);
        const double wq = trapezoid_weight(g, i, j);
        Eigen::Matrix2d grad_w, grad_psi;
        grad_w << w1x[k], w1y[k], w2x[k], w2y[k];
        grad_psi << p1x[k], p1y[k], p2x[k], p2y[k];
        const Eigen::Matrix2d stretch = 0.5 * (grad_w + grad_w.transpose()) +
                                        0.5 * gv[k] * gv[k].transpose() - p.sym_eps_2x2()[k];
        const Eigen::Matrix2d bend = hv[k] + p.sym_kappa_2x2()[k];
        r1 += wq * l2_bilinear(stretch, 0.5 * (grad_psi + grad_psi.transpose()), kUnit);
        r2 += wq * (l2_bilinear(stretch, gv[k] * gphi[k].transpose(), kUnit) +
                    l2_bilinear(bend, hphi[k], kUnit) / 12.0);
      }
    weak_gap = std::max(weak_gap, std::abs(got.first - r1) / (1.0 + std::abs(r1)));
    weak_gap = std::max(weak_gap, std::abs(got.second - r2) / (1.0 + std::abs(r2)));
  }

  char buf[128];
  std::snprintf(buf, sizeof(buf), "energy gap %.2e, aux sup %.2e, weak gap %.2e", energy_gap,
                aux, weak_gap);
  note = buf;
  return energy_gap <= 1e-12 && aux <= 1e-12 && weak_gap <= 1e-12;
}

bool criterion_gamma_limit(std::string& note) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> hs = {0.08, 0.04, 0.02, 0.01};
  GammaOptions opts;  // 65x65 in-plane, 4-point thickness rule, 129^2 reference

  GrowthTensor bend;
  for (int i = 0; i < 3; ++i) bend.kappa[4 * i] = Expr::constant(1.0);
  PlateProblem pa(Grid2D(0, 1, 0, 1, 9, 9), kUnit, ThicknessPair{}, bend);
  const GammaStudy sa = gamma_study(pa, AnalyticDisplacement{}, hs, opts);

  const Expr x = Expr::x1(), y = Expr::x2();
  ThicknessPair thick{Expr::constant(0.5), 0.5 + 0.25 * x};
  GrowthTensor growth = bend;
  growth.kappa[4] = 1.0 + 0.2 * x;
  PlateProblem pb(Grid2D(0, 1, 0, 1, 9, 9), kUnit, thick, growth);
  AnalyticDisplacement db;
  db.v = 0.1 * sin(x) * (1.0 + y);
  db.w = {0.05 * pow(x, 2), -0.04 * x * y};
  const GammaStudy sb = gamma_study(pb, db, hs, opts);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "final gaps %.2e / %.2e, extrapolated %.2e / %.2e, %.1f s", sa.rel_gap.back(),
                sb.rel_gap.back(), sa.extrapolated_gap, sb.extrapolated_gap, seconds);
  note = buf;
  return sa.rel_gap.back() < 0.05 && sb.rel_gap.back() < 0.05 && sa.extrapolated_gap < 0.01 &&
         sb.extrapolated_gap < 0.01 && seconds < 120.0;
}

bool criterion_solver_sanity(std::string& note) {
  PlateProblem p(Grid2D(0, 1, 0, 1, 33, 33), kUnit, ThicknessPair{}, GrowthTensor{});
  SolveConfig cfg;
  cfg.grad_tol = 1e-7;
  cfg.max_iters = 500;
  cfg.seed = 2024;
  cfg.diagnostics = false;
  const SolveReport zero = minimize(p, cfg);

  // Compatible prestrain: (sym eps)_2x2 = sym grad u for a polynomial u.
  const Expr x = Expr::x1(), y = Expr::x2();
  const ExprVec2 u{0.1 * pow(x, 2) + 0.05 * x * y, -0.03 * pow(y, 2) + 0.02 * x * y};
  const ExprMat2 s = sym(ExprMat2{u[0].deriv(0), u[0].deriv(1), u[1].deriv(0), u[1].deriv(1)});
  GrowthTensor compat;
  compat.eps[0] = s[0];
  compat.eps[1] = s[1];
  compat.eps[3] = s[2];
  compat.eps[4] = s[3];
  PlateProblem pc(Grid2D(0, 1, 0, 1, 33, 33), kUnit, ThicknessPair{}, compat);
  SolveConfig cfg2 = cfg;
  cfg2.grad_tol = 1e-9;
  cfg2.max_iters = 2000;
  const SolveReport comp = minimize(pc, cfg2);

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "zero: E %.2e grad %.2e iters %d; compatible: E %.2e", zero.final_energy,
                zero.final_grad_norm, zero.iterations, comp.final_energy);
  note = buf;
  return zero.final_energy <= 1e-8 && zero.final_grad_norm <= 1e-6 && zero.iterations <= 500 &&
         comp.final_energy <= 1e-8;
}

bool criterion_stationarity_refinement(std::string& note) {
  // Post-buckled minimizer of an incompatible in-plane prestrain; total
  // thickness one. Interior = fixed physical margin of 0.1 from the edge.
  GrowthTensor growth;
  growth.eps[0] = Expr::constant(40.0) * pow(sin(Expr::constant(kPi) * Expr::x2()), 2);
  growth.eps[4] = Expr::constant(40.0) * pow(sin(Expr::constant(kPi) * Expr::x1()), 2);

  double weak_max = 0.0;
  double grad_tol = 1e-10;
  double r1n[2], r2n[2];
  int idx = 0;
  bool all_converged = true;
  for (int n : {33, 65}) {
    PlateProblem p(Grid2D(0, 1, 0, 1, n, n), kUnit, ThicknessPair{}, growth);
    Displacement init(p.grid());
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        init.v.at(i, j) = 0.3 * std::sin(kPi * p.grid().x(i)) * std::sin(kPi * p.grid().y(j));
    SolveConfig cfg;
    cfg.grad_tol = grad_tol;
    cfg.max_iters = 15000;
    cfg.diagnostics = false;
    const SolveReport rep = minimize(p, cfg, init);
    all_converged = all_converged && rep.converged;

    const StationarityReport st = stationarity_report(p, rep.displacement, 20);
    weak_max = std::max(weak_max, st.max_normalized_residual);

    const AiryField airy = airy_from_displacement(p, rep.displacement);
    const ElResiduals el = el_residuals(p, rep.displacement, airy);
    const int margin = std::max(2, (int)std::ceil(0.1 / p.grid().hx()));
    r1n[idx] = interior_l2_norm(el.r1, margin);
    r2n[idx] = interior_l2_norm(el.r2, margin);
    ++idx;
  }
  const double order1 = std::log2(r1n[0] / r1n[1]);
  const double order2 = std::log2(r2n[0] / r2n[1]);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "weak max %.2e (tol %.0e), EL orders r1 %.2f r2 %.2f",
                weak_max, 10.0 * grad_tol, order1, order2);
  note = buf;
  return all_converged && weak_max <= 10.0 * grad_tol && order1 >= 1.0 && order2 >= 1.0;
}

bool criterion_midsurface_forms(std::string& note) {
  const Expr x = Expr::x1(), y = Expr::x2();
  ThicknessPair thick{Expr::constant(0.5), 0.5 + 0.25 * x};
  GrowthTensor growth;
  for (int i = 0; i < 3; ++i) growth.kappa[4 * i] = Expr::constant(1.0);
  growth.eps[0] = 0.1 * y;
  growth.eps[2] = 0.2 * y;
  growth.kappa[5] = 0.1 + 0.2 * x;
  growth.kappa[4] = 1.0 + 0.3 * x;
  PlateProblem p(Grid2D(0, 1, 0, 1, 9, 9), kUnit, thick, growth);
  AnalyticDisplacement d;
  d.w = {0.05 * pow(x, 2) * y, -0.04 * x * pow(y, 2)};
  d.v = 0.1 * sin(x) * (1.0 + y) + 0.05 * pow(x, 3);

  const Eigen::Vector2d at(0.35, 0.55), tau(0.6, 0.8), eta_v(-0.8, 0.6);
  double first[3], second[3];
  int idx = 0;
  for (double h : {0.08, 0.04, 0.02}) {
    const MidsurfaceGaps gaps = midsurface_forms(p, d, h, at, tau, eta_v);
    first[idx] = std::abs(gaps.first_form_gap);
    second[idx] = std::abs(gaps.second_form_gap);
    ++idx;
  }
  double o1_min = 1e9, o1_max = -1e9, o2_min = 1e9, o2_max = -1e9;
  for (int k = 0; k < 2; ++k) {
    const double o1 = std::log2(first[k] / first[k + 1]);
    const double o2 = std::log2(second[k] / second[k + 1]);
    o1_min = std::min(o1_min, o1);
    o1_max = std::max(o1_max, o1);
    o2_min = std::min(o2_min, o2);
    o2_max = std::max(o2_max, o2);
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "first-form orders [%.2f, %.2f], second-form [%.2f, %.2f]",
                o1_min, o1_max, o2_min, o2_max);
  note = buf;
  return o1_min >= 2.5 && o1_max <= 3.5 && o2_min >= 1.5 && o2_max <= 2.5;
}

bool criterion_invariances(std::string& note) {
  PlateProblem p = generic_problem(17);
  Rng rng(1010);
  const Displacement d = random_nodal(p.grid(), rng, 0.4);
  const double base = energy_Ig(p, d);
  Displacement shifted = d;
  for (int k = 0; k < p.grid().size(); ++k) shifted.v[k] += 0.731;
  const double vert = std::abs(energy_Ig(p, shifted) - base) / (1.0 + base);
  shifted = d;
  for (int k = 0; k < p.grid().size(); ++k) shifted.w[k] += Eigen::Vector2d(0.37, -1.2);
  const double horiz = std::abs(energy_Ig(p, shifted) - base) / (1.0 + base);

  const Expr x = Expr::x1(), y = Expr::x2();
  ThicknessPair thick{Expr::constant(0.5), 0.5 + 0.25 * x};
  GrowthTensor growth;
  for (int i = 0; i < 3; ++i) growth.kappa[4 * i] = Expr::constant(1.0);
  growth.eps[0] = 0.1 * y;
  PlateProblem p3(Grid2D(0, 1, 0, 1, 9, 9), kUnit, thick, growth);
  AnalyticDisplacement ad;
  ad.v = 0.1 * sin(x) * (1.0 + y);
  ad.w = {0.05 * pow(x, 2), -0.04 * x * y};
  RecoveryDeformation rec(p3, ad, 0.05);
  const double e_base = energy_3d(p3, rec, 33, 4);
  rec.set_rotation(rng.rotation3());
  const double e_rot = energy_3d(p3, rec, 33, 4);
  const double frame = std::abs(e_rot - e_base) / (1.0 + std::abs(e_base));

  char buf[128];
  std::snprintf(buf, sizeof(buf), "shift gaps %.2e / %.2e, frame gap %.2e", vert, horiz, frame);
  note = buf;
  return vert <= 1e-12 && horiz <= 1e-12 && frame <= 1e-12;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"1. Q2 oracle equivalence (closed form vs completion minimization)",
       criterion_q2_equivalence},
      {"2. Hessian identity of the stored density at the identity", criterion_hessian_identity},
      {"3. Discrete gradient vs finite differences of the energy",
       criterion_gradient_consistency},
      {"4. Hand-valued energies 1/3 and 5/18", criterion_hand_energies},
      {"5. Uniform-thickness reduction (energy, auxiliaries, weak forms)",
       criterion_uniform_reduction},
      {"6. Scaled 3d energies approach the limit energy", criterion_gamma_limit},
      {"7. Solver sanity (zero and compatible prestrain)", criterion_solver_sanity},
      {"8. Stationarity and Euler-Lagrange refinement consistency",
       criterion_stationarity_refinement},
      {"9. Mid-surface fundamental-form remainders", criterion_midsurface_forms},
      {"10. Shift invariances and end-to-end frame indifference", criterion_invariances},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string note;
    bool ok = false;
    try {
      ok = c.run(note);
    } catch (const std::exception& err) {
      note = std::string("exception: ") + err.what();
    }
    std::printf("[%s] %s  (%s)\n", ok ? "PASS" : "FAIL", c.label.c_str(), note.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
