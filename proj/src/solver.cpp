#include "fvk/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <deque>
#include <sstream>

namespace fvk {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform_pm1(std::uint64_t& state) {
  return 2.0 * (static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53) - 1.0;
}

Eigen::VectorXd pack(const Displacement& d) {
  const int n = d.v.size();
  Eigen::VectorXd x(3 * n);
  for (int k = 0; k < n; ++k) {
    x(k) = d.w[k](0);
    x(n + k) = d.w[k](1);
    x(2 * n + k) = d.v[k];
  }
  return x;
}

Displacement unpack(const Grid2D& g, const Eigen::VectorXd& x) {
  Displacement d(g);
  const int n = g.size();
  for (int k = 0; k < n; ++k) {
    d.w[k] = Eigen::Vector2d(x(k), x(n + k));
    d.v[k] = x(2 * n + k);
  }
  return d;
}

// Remove the in-plane and vertical translation modes.
void project_gauge(Eigen::VectorXd& x, int n) {
  for (int block = 0; block < 3; ++block) {
    const double mean = x.segment(block * n, n).mean();
    x.segment(block * n, n).array() -= mean;
  }
}

Eigen::VectorXd pack_gradient(const EnergyGradient& g) {
  const int n = g.dv.size();
  Eigen::VectorXd out(3 * n);
  for (int k = 0; k < n; ++k) {
    out(k) = g.dw[k](0);
    out(n + k) = g.dw[k](1);
    out(2 * n + k) = g.dv[k];
  }
  return out;
}

using Sparse = Eigen::SparseMatrix<double>;

Sparse sparse_axis_operator(const Grid2D& g, const Deriv1D& table, bool along_x) {
  std::vector<Eigen::Triplet<double>> trip;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const auto& row = table.rows[along_x ? i : j];
      const int node = g.idx(i, j);
      for (std::size_t k = 0; k < row.weight.size(); ++k) {
        const int off = row.start + static_cast<int>(k);
        trip.emplace_back(node, along_x ? g.idx(off, j) : g.idx(i, off), row.weight[k]);
      }
    }
  Sparse a(g.size(), g.size());
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

Sparse weighted_gram(const Sparse& a, const Eigen::VectorXd& q) {
  return Sparse(a.transpose() * (q.asDiagonal() * a));
}

// Fixed structural metric used as the initial quasi-Newton Hessian: a
// membrane form for the in-plane components and a thickness-weighted
// bending form (plus a lower-order membrane term lifting the affine
// kernel) for the deflection. State-independent; the secant pairs carry
// the rest of the curvature.
class StructuralMetric {
 public:
  explicit StructuralMetric(const PlateProblem& p) : n_(p.grid().size()) {
    const Grid2D& g = p.grid();
    const double modulus = 2.0 * p.material().mu + p.material().trace_modulus_2d();

    Eigen::VectorXd wq_mem(n_), wq_bend(n_);
    for (int k = 0; k < n_; ++k) {
      wq_mem(k) = p.weights()[k] * p.g_sum()[k];
      wq_bend(k) = p.weights()[k] * p.g_sum_cubed()[k] / 12.0;
    }

    const Sparse dx = sparse_axis_operator(g, make_deriv1(g.nx, g.hx()), true);
    const Sparse dy = sparse_axis_operator(g, make_deriv1(g.ny, g.hy()), false);
    const Sparse dxx = sparse_axis_operator(g, make_deriv2(g.nx, g.hx()), true);
    const Sparse dyy = sparse_axis_operator(g, make_deriv2(g.ny, g.hy()), false);
    const Sparse dxy(dx * dy);

    Sparse membrane = weighted_gram(dx, wq_mem) + weighted_gram(dy, wq_mem);
    membrane *= modulus;
    Sparse bending = weighted_gram(dxx, wq_bend) + weighted_gram(dyy, wq_bend);
    bending += Sparse(2.0 * weighted_gram(dxy, wq_bend));
    bending *= modulus;
    // Membrane-stress contribution to the deflection stiffness, sized by
    // the prestrain magnitude; also lifts the affine null space.
    double stress_scale = 0.5;
    for (int k = 0; k < n_; ++k)
      stress_scale = std::max(stress_scale, p.sym_eps_2x2()[k].norm() +
                                                0.5 * std::abs(p.g_diff()[k]) *
                                                    p.sym_kappa_2x2()[k].norm());
    bending += Sparse(stress_scale * membrane);

    // Small diagonal shift: the remaining kernel (constants) is handled by
    // the gauge projection; the shift only keeps the factorization safe.
    auto shift = [&](Sparse& m) {
      double max_diag = 0.0;
      for (int k = 0; k < n_; ++k) max_diag = std::max(max_diag, m.coeff(k, k));
      Sparse eye(n_, n_);
      eye.setIdentity();
      m += Sparse(1e-10 * max_diag * eye);
    };
    shift(membrane);
    shift(bending);

    membrane_.compute(membrane);
    bending_.compute(bending);
    if (membrane_.info() != Eigen::Success || bending_.info() != Eigen::Success)
      throw SolverError("minimize: preconditioner factorization failed");
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(3 * n_);
    out.segment(0, n_) = membrane_.solve(v.segment(0, n_));
    out.segment(n_, n_) = membrane_.solve(v.segment(n_, n_));
    out.segment(2 * n_, n_) = bending_.solve(v.segment(2 * n_, n_));
    return out;
  }

 private:
  int n_;
  Eigen::SimplicialLDLT<Sparse> membrane_;
  Eigen::SimplicialLDLT<Sparse> bending_;
};

// Random polynomial of total degree <= 3 in (x1, x2).
Expr random_cubic(std::uint64_t& state) {
  Expr out;
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 3; ++b)
      out = out + Expr::constant(uniform_pm1(state)) * pow(Expr::x1(), a) * pow(Expr::x2(), b);
  return out;
}

double euclidean_norm(const Vector2Field& f) {
  double acc = 0.0;
  for (const auto& v : f.values) acc += v.squaredNorm();
  return std::sqrt(acc);
}

double euclidean_norm(const ScalarField& f) {
  double acc = 0.0;
  for (double v : f.values) acc += v * v;
  return std::sqrt(acc);
}

}  // namespace

void SolveConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("SolveConfig: max_iters must be >= 1");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("SolveConfig: grad_tol must be positive");
  if (memory < 1) throw std::invalid_argument("SolveConfig: memory must be >= 1");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw std::invalid_argument("SolveConfig: backtrack factor must lie in (0, 1)");
  if (!(armijo_c > 0.0 && armijo_c < 1.0))
    throw std::invalid_argument("SolveConfig: armijo_c must lie in (0, 1)");
}

Displacement random_displacement(const Grid2D& grid, std::uint64_t seed, double amplitude) {
  std::uint64_t state = seed;
  Displacement d(grid);
  for (int k = 0; k < grid.size(); ++k)
    d.w[k] = Eigen::Vector2d(amplitude * uniform_pm1(state), amplitude * uniform_pm1(state));
  for (int k = 0; k < grid.size(); ++k) d.v[k] = amplitude * uniform_pm1(state);
  return d;
}

SolveReport minimize(const PlateProblem& p, const SolveConfig& cfg, const Displacement& init) {
  cfg.validate();
  const Grid2D& grid = p.grid();
  const int n = grid.size();

  auto energy_at = [&](const Eigen::VectorXd& x) {
    const double e = energy_Ig(p, unpack(grid, x));
    if (!std::isfinite(e)) throw SolverError("minimize: non-finite energy encountered");
    return e;
  };
  auto gradient_at = [&](const Eigen::VectorXd& x) {
    return pack_gradient(grad_Ig(p, unpack(grid, x)));
  };

  const StructuralMetric metric(p);

  Eigen::VectorXd x = pack(init);
  project_gauge(x, n);

  SolveReport report;
  double energy = energy_at(x);
  Eigen::VectorXd grad = gradient_at(x);
  double grad_norm = grad.norm();
  report.energy_trace.push_back(energy);

  struct Pair {
    Eigen::VectorXd s, y;
    double rho;
  };
  std::deque<Pair> history;
  double gamma = 1.0;  // Rayleigh scaling of the metric from the latest pair

  int iter = 0;
  for (; iter < cfg.max_iters && grad_norm > cfg.grad_tol; ++iter) {
    // Two-loop recursion with the structural metric as initial Hessian.
    Eigen::VectorXd q = grad;
    std::vector<double> alpha(history.size());
    for (int k = static_cast<int>(history.size()) - 1; k >= 0; --k) {
      alpha[k] = history[k].rho * history[k].s.dot(q);
      q -= alpha[k] * history[k].y;
    }
    Eigen::VectorXd r = gamma * metric.apply(q);
    for (std::size_t k = 0; k < history.size(); ++k) {
      const double beta = history[k].rho * history[k].y.dot(r);
      r += (alpha[k] - beta) * history[k].s;
    }
    Eigen::VectorXd dir = -r;

    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      history.clear();
      gamma = 1.0;
      dir = -metric.apply(grad);
      slope = grad.dot(dir);
      if (!(slope < 0.0)) {
        dir = -grad;
        slope = -grad.squaredNorm();
      }
    }

    double step = 1.0;
    double trial_energy = 0.0;
    Eigen::VectorXd trial;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      trial = x + step * dir;
      trial_energy = energy_at(trial);
      if (trial_energy <= energy + cfg.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= cfg.backtrack;
    }
    if (!accepted) {
      std::ostringstream os;
      os << "minimize: line search failed at iteration " << iter << " (energy " << energy
         << ", gradient norm " << grad_norm << ")";
      throw SolverError(os.str());
    }

    project_gauge(trial, n);
    const Eigen::VectorXd new_grad = gradient_at(trial);
    const Eigen::VectorXd s = trial - x;
    const Eigen::VectorXd y = new_grad - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      history.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(history.size()) > cfg.memory) history.pop_front();
      const double ypy = y.dot(metric.apply(y));
      if (ypy > 0.0) gamma = sy / ypy;
    }

    x = trial;
    energy = energy_at(x);  // projection is energy-neutral up to rounding
    grad = new_grad;
    grad_norm = grad.norm();
    report.energy_trace.push_back(energy);
  }

  report.displacement = unpack(grid, x);
  report.final_energy = energy;
  report.final_grad_norm = grad_norm;
  report.iterations = iter;
  report.converged = grad_norm <= cfg.grad_tol;
  report.stop_reason = report.converged ? "grad_tol" : "max_iters";

  if (cfg.diagnostics) {
    report.stationarity =
        stationarity_report(p, report.displacement, cfg.n_stationarity_tests, cfg.seed + 1);
    const AiryField airy = airy_from_displacement(p, report.displacement);
    const ElResiduals el = el_residuals(p, report.displacement, airy);
    report.el_r1_l2 = interior_l2_norm(el.r1, el.margin);
    report.el_r2_l2 = interior_l2_norm(el.r2, el.margin);
    const BoundaryResiduals bd = boundary_residuals(p, report.displacement, airy);
    report.bdry_b1 = bd.b1;
    report.bdry_b2 = bd.b2;
    report.bdry_b3 = bd.b3;
    report.airy_ls_residual = airy.ls_residual;
  }
  return report;
}

SolveReport minimize(const PlateProblem& p, const SolveConfig& cfg) {
  return minimize(p, cfg, random_displacement(p.grid(), cfg.seed, cfg.init_amplitude));
}

StationarityReport stationarity_report(const PlateProblem& p, const Displacement& d, int n_tests,
                                       std::uint64_t seed) {
  StationarityReport report;
  report.n_tests = n_tests;
  if (n_tests <= 0) return report;

  std::uint64_t state = seed;
  for (int t = 0; t < n_tests; ++t) {
    const ExprVec2 psi{random_cubic(state), random_cubic(state)};
    const Expr phi = random_cubic(state);
    const Vector2Field psi_s = sample(psi, p.grid());
    const ScalarField phi_s = sample(phi, p.grid());
    const auto r = weak_residual(p, d, psi_s, phi_s);
    const double norm_psi = euclidean_norm(psi_s);
    const double norm_phi = euclidean_norm(phi_s);
    const std::array<double, 2> normalized = {
        std::abs(r.first) / (norm_psi > 0 ? norm_psi : 1.0),
        std::abs(r.second) / (norm_phi > 0 ? norm_phi : 1.0)};
    report.samples.push_back(normalized);
    report.max_normalized_residual =
        std::max({report.max_normalized_residual, normalized[0], normalized[1]});
  }
  return report;
}

}  // namespace fvk
