#include "fvk/gamma.hpp"

#include <doctest.h>

#include <cmath>

#include "fvk/limit_energy.hpp"
#include "test_util.hpp"

using namespace fvk;
using testutil::Rng;

namespace {

const LameMaterial kUnit(1.0, 1.0);

PlateProblem uniform_plate(int n = 9) {
  return PlateProblem(Grid2D(0, 1, 0, 1, n, n), kUnit, ThicknessPair{}, GrowthTensor{});
}

GrowthTensor identity_kappa() {
  GrowthTensor g;
  for (int i = 0; i < 3; ++i) g.kappa[4 * i] = Expr::constant(1.0);
  return g;
}

AnalyticDisplacement zero_displacement() { return AnalyticDisplacement{}; }

// Smooth generic data on a variable-thickness plate.
struct TestCase {
  PlateProblem problem;
  AnalyticDisplacement d;
};

TestCase generic_case() {
  const Expr x = Expr::x1(), y = Expr::x2();
  ThicknessPair thick{Expr::constant(0.5), 0.5 + 0.25 * x};
  GrowthTensor growth = identity_kappa();
  growth.eps[0] = 0.1 * y;
  growth.eps[2] = 0.2 * y;  // out-of-plane shear components keep the
  growth.kappa[5] = 0.1 + 0.2 * x;  // expansion remainders generic
  growth.kappa[4] = 1.0 + 0.3 * x;
  PlateProblem p(Grid2D(0, 1, 0, 1, 9, 9), kUnit, thick, growth);
  AnalyticDisplacement d;
  d.w = {0.05 * pow(x, 2) * y, -0.04 * x * pow(y, 2)};
  d.v = 0.1 * sin(x) * (1.0 + y) + 0.05 * pow(x, 3);
  return {std::move(p), std::move(d)};
}

}  // namespace

TEST_CASE("growth tensor evaluation and invertibility guard") {
  PlateProblem p0 = uniform_plate();
  const Eigen::Matrix3d a = growth_tensor_at(p0, 0.3, 0.2, 0.7, 0.05);
  CHECK((a - Eigen::Matrix3d::Identity()).norm() == 0.0);

  GrowthTensor eps_id;
  for (int i = 0; i < 3; ++i) eps_id.eps[4 * i] = Expr::constant(1.0);
  PlateProblem pe(Grid2D(0, 1, 0, 1, 9, 9), kUnit, ThicknessPair{}, eps_id);
  const Eigen::Matrix3d ae = growth_tensor_at(pe, 0.1, 0.5, 0.5, 0.0);
  CHECK((ae - 1.01 * Eigen::Matrix3d::Identity()).norm() <= 1e-15);

  // a^h - Id = O(h) uniformly.
  PlateProblem pk(Grid2D(0, 1, 0, 1, 9, 9), kUnit, ThicknessPair{}, identity_kappa());
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const double h = rng.uniform(0.01, 0.2);
    const double x3 = rng.uniform(-0.5, 0.5) * h;
    const Eigen::Matrix3d ak = growth_tensor_at(pk, h, rng.next_double(), rng.next_double(), x3);
    CHECK((ak - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= h * (0.5 + h));
  }

  GrowthTensor big;
  for (int i = 0; i < 3; ++i) big.kappa[4 * i] = Expr::constant(-100.0);
  PlateProblem pb(Grid2D(0, 1, 0, 1, 9, 9), kUnit, ThicknessPair{}, big);
  CHECK_THROWS_AS(growth_tensor_at(pb, 0.5, 0.5, 0.5, 0.2), std::runtime_error);
}

TEST_CASE("thickness change of variable hits the faces") {
  ThicknessPair thick{0.4 + 0.1 * Expr::x2(), Expr::constant(0.7)};
  PlateProblem p(Grid2D(0, 1, 0, 1, 9, 9), kUnit, thick, GrowthTensor{});
  const double h = 0.05, x1 = 0.3, x2 = 0.8;
  const double g1 = 0.4 + 0.1 * x2, g2 = 0.7;
  CHECK(s_map(p, h, x1, x2, 0.5) == doctest::Approx(h * g2).epsilon(1e-15));
  CHECK(s_map(p, h, x1, x2, -0.5) == doctest::Approx(-h * g1).epsilon(1e-15));

  PlateProblem pu = uniform_plate();
  CHECK(s_map(pu, h, x1, x2, 0.0) == 0.0);
  CHECK_THROWS_AS(s_map(pu, h, x1, x2, 0.7), std::invalid_argument);
}

TEST_CASE("gauss rule integrates polynomials of degree 2n-1 on the unit interval") {
  for (int n : {2, 4, 6}) {
    const QuadRule rule = gauss_legendre_unit(n);
    double wsum = 0.0;
    for (double w : rule.weight) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += rule.weight[k] * std::pow(rule.node[k], deg);
      const double exact = (deg % 2 == 1) ? 0.0
                                          : std::pow(0.5, deg + 1) * 2.0 / (deg + 1);
      CHECK(acc == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("recovery of zero data is the identity") {
  PlateProblem p = uniform_plate();
  const RecoveryDeformation rec(p, zero_displacement(), 0.1);
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const double x1 = rng.next_double(), x2 = rng.next_double();
    const double x3 = rng.uniform(-0.05, 0.05);
    CHECK((rec.value(x1, x2, x3) - Eigen::Vector3d(x1, x2, x3)).norm() == 0.0);
    CHECK((rec.jacobian(x1, x2, x3) - Eigen::Matrix3d::Identity()).norm() == 0.0);
  }
}

TEST_CASE("recovery hand case: v = x1 lifts the midplane by h x1") {
  PlateProblem p = uniform_plate();
  AnalyticDisplacement d;
  d.v = Expr::x1();
  const double h = 0.05;
  const RecoveryDeformation rec(p, d, h);
  CHECK(rec.value(0.3, 0.9, 0.0)(2) == doctest::Approx(h * 0.3).epsilon(1e-15));
}

TEST_CASE("pure bending recovery coefficients match the hand solve") {
  PlateProblem p(Grid2D(0, 1, 0, 1, 9, 9), kUnit, ThicknessPair{}, identity_kappa());
  const RecoveryDeformation rec(p, zero_displacement(), 0.1);
  // d0 = 0, d1 = l(Id) + c(-Id2) = (0,0,1) + (0,0,2/3).
  for (int c = 0; c < 3; ++c) CHECK(rec.d0()[c].is_constant(0.0));
  CHECK(rec.d1()[0].is_constant(0.0));
  CHECK(rec.d1()[1].is_constant(0.0));
  CHECK(rec.d1()[2].eval(0.4, 0.6) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("recovery jacobian matches finite differences of the value") {
  const TestCase tc = generic_case();
  const double h = 0.07;
  const RecoveryDeformation rec(tc.problem, tc.d, h);
  Rng rng(5);
  const double step = 1e-6;
  for (int t = 0; t < 15; ++t) {
    const Eigen::Vector3d at(rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9),
                             rng.uniform(-0.03, 0.03));
    const Eigen::Matrix3d jac = rec.jacobian(at(0), at(1), at(2));
    for (int axis = 0; axis < 3; ++axis) {
      Eigen::Vector3d lo = at, hi = at;
      lo(axis) -= step;
      hi(axis) += step;
      const Eigen::Vector3d fd =
          (rec.value(hi(0), hi(1), hi(2)) - rec.value(lo(0), lo(1), lo(2))) / (2 * step);
      CHECK((jac.col(axis) - fd).norm() <= 1e-6 * (1.0 + fd.norm()));
    }
  }
}

TEST_CASE("taylor consistency of the density along the FvK scaling") {
  Rng rng(7);
  for (int t = 0; t < 5; ++t) {
    Eigen::Matrix3d z = rng.matrix3();
    z = (0.5 * (z + z.transpose())).eval();
    const double q = 0.5 * q3(z, kUnit);
    for (double h : {1e-2, 1e-3, 1e-4}) {
      const double w = density_W(Eigen::Matrix3d::Identity() + h * h * z, kUnit);
      CHECK(std::abs(w / (h * h * h * h) - q) <= 20.0 * h * h * (1.0 + q) * (1.0 + z.norm()));
    }
  }
}

TEST_CASE("energy of the identity recovery is zero; rigid motions too") {
  PlateProblem p = uniform_plate();
  RecoveryDeformation rec(p, zero_displacement(), 0.1);
  CHECK(energy_3d(p, rec, 9, 3) == 0.0);

  Rng rng(11);
  rec.set_rotation(rng.rotation3());
  CHECK(energy_3d(p, rec, 9, 3) <= 1e-14);
}

TEST_CASE("end-to-end frame indifference of the 3d energy") {
  const TestCase tc = generic_case();
  RecoveryDeformation rec(tc.problem, tc.d, 0.05);
  const double base = energy_3d(tc.problem, rec, 17, 4);
  Rng rng(13);
  rec.set_rotation(rng.rotation3());
  const double rotated = energy_3d(tc.problem, rec, 17, 4);
  CHECK(std::abs(rotated - base) <= 1e-12 * (1.0 + std::abs(base)));
}

TEST_CASE("thickness quadrature is converged at modest order") {
  // In-plane-constant data: strains are constant, so the only quadrature
  // error lives in the thickness rule.
  const Expr x = Expr::x1(), y = Expr::x2();
  GrowthTensor growth = identity_kappa();
  PlateProblem p(Grid2D(0, 1, 0, 1, 9, 9), kUnit, ThicknessPair{}, growth);
  AnalyticDisplacement d;
  d.v = 0.3 * x + 0.1 * y;
  d.w = {0.2 * x, -0.1 * y};
  const RecoveryDeformation rec(p, d, 0.05);
  const double coarse = energy_3d(p, rec, 9, 4);
  const double fine = energy_3d(p, rec, 17, 8);
  CHECK(std::abs(fine - coarse) <= 1e-8 * std::abs(fine));

  // Generic data: doubling both orders moves the value only slightly.
  const TestCase tc = generic_case();
  const RecoveryDeformation rg(tc.problem, tc.d, 0.05);
  const double c2 = energy_3d(tc.problem, rg, 17, 4);
  const double f2 = energy_3d(tc.problem, rg, 33, 8);
  CHECK(std::abs(f2 - c2) <= 2e-3 * std::abs(f2));
}

TEST_CASE("threaded energy equals the single-threaded block sum layout") {
  const TestCase tc = generic_case();
  const RecoveryDeformation rec(tc.problem, tc.d, 0.05);
  const double t1 = energy_3d(tc.problem, rec, 17, 4, 1);
  const double t4 = energy_3d(tc.problem, rec, 17, 4, 4);
  CHECK(std::abs(t4 - t1) <= 1e-13 * (1.0 + std::abs(t1)));
}

TEST_CASE("gamma study on zero data is identically zero") {
  PlateProblem p = uniform_plate();
  GammaOptions opts;
  opts.n_inplane = 9;
  opts.n_thickness = 3;
  opts.n_reference = 17;
  const GammaStudy st = gamma_study(p, zero_displacement(), {0.1, 0.05}, opts);
  CHECK(st.reference_Ig == 0.0);
  for (double e : st.scaled_energy) CHECK(e == 0.0);
  CHECK(st.extrapolated == 0.0);
}

TEST_CASE("gamma study: pure bending approaches 5/18") {
  PlateProblem p(Grid2D(0, 1, 0, 1, 9, 9), kUnit, ThicknessPair{}, identity_kappa());
  GammaOptions opts;
  opts.n_inplane = 17;
  opts.n_thickness = 4;
  opts.n_reference = 33;
  const GammaStudy st = gamma_study(p, zero_displacement(), {0.08, 0.04, 0.02, 0.01}, opts);
  CHECK(st.reference_Ig == doctest::Approx(5.0 / 18.0).epsilon(1e-12));
  CHECK(st.rel_gap.back() < 0.05);
  CHECK(st.extrapolated_gap < 0.01);
  CHECK(st.rel_gap.back() <= st.rel_gap.front());
  CHECK_THROWS_AS(gamma_study(p, zero_displacement(), {0.01, 0.02}, opts),
                  std::invalid_argument);
}

TEST_CASE("midsurface gaps vanish for zero data") {
  PlateProblem p = uniform_plate();
  const MidsurfaceGaps gaps = midsurface_forms(p, zero_displacement(), 0.05,
                                               Eigen::Vector2d(0.3, 0.6),
                                               Eigen::Vector2d(1.0, 0.0),
                                               Eigen::Vector2d(0.0, 1.0));
  CHECK(gaps.first_form_gap == 0.0);
  CHECK(gaps.second_form_gap == 0.0);
}

TEST_CASE("midsurface gaps shrink at third and second order in h") {
  const TestCase tc = generic_case();
  const Eigen::Vector2d x(0.35, 0.55);
  const Eigen::Vector2d tau(0.6, 0.8), eta(-0.8, 0.6);
  double first[3], second[3];
  int idx = 0;
  for (double h : {0.08, 0.04, 0.02}) {
    const MidsurfaceGaps gaps = midsurface_forms(tc.problem, tc.d, h, x, tau, eta);
    first[idx] = std::abs(gaps.first_form_gap);
    second[idx] = std::abs(gaps.second_form_gap);
    ++idx;
  }
  for (int k = 0; k < 2; ++k) {
    const double order1 = std::log2(first[k] / first[k + 1]);
    const double order2 = std::log2(second[k] / second[k + 1]);
    CHECK(order1 > 2.5);
    CHECK(order1 < 3.5);
    CHECK(order2 > 1.5);
    CHECK(order2 < 2.5);
  }
}

TEST_CASE("recovery normalization deviates from the flat state at rate O(h)") {
  const TestCase tc = generic_case();
  auto sup_dev = [&](double h) {
    const RecoveryDeformation rec(tc.problem, tc.d, h);
    double sup = 0.0;
    for (int j = 0; j <= 8; ++j)
      for (int i = 0; i <= 8; ++i)
        for (double t : {-0.5, -0.25, 0.0, 0.25, 0.5}) {
          const double x1 = i / 8.0, x2 = j / 8.0;
          const double x3 = s_map(tc.problem, h, x1, x2, t);
          const Eigen::Vector3d u = rec.value(x1, x2, x3);
          sup = std::max(sup, (u - Eigen::Vector3d(x1, x2, 0.0)).norm());
        }
    return sup;
  };
  const double d1 = sup_dev(0.08), d2 = sup_dev(0.04), d3 = sup_dev(0.02);
  CHECK(d2 / d1 > 0.4);
  CHECK(d2 / d1 < 0.6);
  CHECK(d3 / d2 > 0.4);
  CHECK(d3 / d2 < 0.6);
}
