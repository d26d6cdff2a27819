// The 3D side of the limit: explicit recovery deformations with exact
// symbolic Jacobians, the prestrained 3D energy by tensor quadrature,
// h-refinement studies of the scaled energies, and the fundamental-form
// expansions of the geometric mid-surface.
#pragma once

#include <string>
#include <vector>

#include "fvk/problem.hpp"

namespace fvk {

// Displacement given in closed form; the recovery construction needs
// exact derivatives up to the third order of v.
struct AnalyticDisplacement {
  ExprVec2 w;
  Expr v;
};

// a^h(x', x3) = Id + h^2 eps(x') + h x3 kappa(x'). Throws if det <= 0.
Eigen::Matrix3d growth_tensor_at(const PlateProblem& p, double h, double x1, double x2,
                                 double x3);

// Thickness change of variable s^h(x', t) = (g1^h + g2^h) t + (g2^h - g1^h)/2
// with g_i^h = h g_i; maps t = +-1/2 to the physical faces.
double s_map(const PlateProblem& p, double h, double x1, double x2, double t);

// Gauss-Legendre nodes and weights on (-1/2, 1/2), weights summing to one.
struct QuadRule {
  std::vector<double> node;
  std::vector<double> weight;
};
QuadRule gauss_legendre_unit(int n);

// The recovery deformation
//   u^h = (x', x3) + (h^2 w, h v) + (x3 - (g2^h - g1^h)/2)(-h grad v, 0)
//         + h^2 x3 d0 + (h/2) x3^2 d1,
//   d0 = l(eps) + c(stretching strain) - (g2-g1)/2 c(-hess v - (sym kappa)_2x2),
//   d1 = l(kappa) + c(-hess v - (sym kappa)_2x2).
// Polynomial in x3 with analytic coefficients; the Jacobian is exact. An
// optional fixed rotation composes on the left for frame-indifference
// checks.
class RecoveryDeformation {
 public:
  RecoveryDeformation(const PlateProblem& p, const AnalyticDisplacement& d, double h);

  double h() const { return h_; }
  const ExprVec3& d0() const { return d0_; }
  const ExprVec3& d1() const { return d1_; }

  void set_rotation(const Eigen::Matrix3d& r) { rotation_ = r; }

  Eigen::Vector3d value(double x1, double x2, double x3) const;
  Eigen::Matrix3d jacobian(double x1, double x2, double x3) const;

  // Everything energy_3d needs at one in-plane point; x3 dependence is
  // assembled from the polynomial coefficients.
  struct InPlanePoint {
    Eigen::Vector3d a0, a1, a2;
    Eigen::Matrix<double, 3, 2> j0, j1, j2;
    Eigen::Matrix3d eps, kappa;
    double g1, g2;
  };
  InPlanePoint eval_inplane(double x1, double x2) const;
  Eigen::Vector3d value_at(const InPlanePoint& q, double x3) const;
  Eigen::Matrix3d jacobian_at(const InPlanePoint& q, double x3) const;

 private:
  double h_;
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  ExprVec3 d0_, d1_;
  std::vector<Expr> outputs_;
  ExprTape tape_;
};

// I^h of the deformation by tensor quadrature: composite trapezoid with
// n_inplane nodes per axis over the rectangle, Gauss-Legendre with
// n_thickness points through the thickness map. `threads` splits the
// in-plane rows into contiguous blocks with a fixed summation order.
double energy_3d(const PlateProblem& p, const RecoveryDeformation& u, int n_inplane,
                 int n_thickness, int threads = 1);

struct GammaStudy {
  std::vector<double> h;
  std::vector<double> scaled_energy;  // h^-4 I^h
  std::vector<double> rel_gap;        // against reference_Ig
  double reference_Ig;
  double extrapolated;     // linear-in-h extrapolation from the last two h
  double extrapolated_gap;
};

struct GammaOptions {
  int n_inplane = 65;
  int n_thickness = 4;
  int n_reference = 129;  // grid for the limit-energy reference
  int threads = 1;
};

// Evaluates h^-4 I^h(u^h) along a strictly decreasing h list and compares
// with energy_Ig of the sampled displacement on a fine grid.
GammaStudy gamma_study(const PlateProblem& p, const AnalyticDisplacement& d,
                       const std::vector<double>& h_list, const GammaOptions& opts = {});

// CSV rows "h,scaled_energy,rel_gap_to_Ig" plus one extrapolation footer.
void write_gamma_csv(const std::string& path, const GammaStudy& study);

// Remainders of the mid-surface fundamental-form expansions at one point:
//   first_form_gap  = |d_tau phi1|^2 - |(a^h o phi~)(d_tau phi~)|^2
//                     - 2 h^2 tau^T (stretching strain) tau          = O(h^3)
//   second_form_gap = <d_tau(n1/|n1|), d_eta phi1>
//                     - <((1/2) d3 G^h) d_tau phi~, d_eta phi~>
//                     - <d_tau(n~/|n~|), d_eta phi~>
//                     + h <(hess v + (sym kappa)_2x2) tau, eta>      = O(h^2).
struct MidsurfaceGaps {
  double first_form_gap;
  double second_form_gap;
};
MidsurfaceGaps midsurface_forms(const PlateProblem& p, const AnalyticDisplacement& d, double h,
                                const Eigen::Vector2d& x, const Eigen::Vector2d& tau,
                                const Eigen::Vector2d& eta);

}  // namespace fvk
