// Limited-memory quasi-Newton minimization of the discrete plate energy
// over nodal displacements, with descent line search, gauge fixing of the
// shift invariances, and stationarity diagnostics.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fvk/airy.hpp"
#include "fvk/limit_energy.hpp"

namespace fvk {

struct SolveConfig {
  int max_iters = 500;
  double grad_tol = 1e-6;
  int memory = 8;            // quasi-Newton history length
  double armijo_c = 1e-4;    // sufficient-decrease constant
  double backtrack = 0.5;    // step shrink factor
  std::uint64_t seed = 0;
  double init_amplitude = 1e-2;
  bool diagnostics = true;   // fill residual summaries after the solve
  int n_stationarity_tests = 20;

  void validate() const;
};

struct StationarityReport {
  int n_tests = 0;
  double max_normalized_residual = 0.0;
  // Per test pair: |r1| / ||psi||, |r2| / ||phi|| with sampled test-field
  // Euclidean norms.
  std::vector<std::array<double, 2>> samples;
};

struct SolveReport {
  Displacement displacement;
  std::vector<double> energy_trace;  // initial energy plus one entry per accepted step
  double final_energy = 0.0;
  double final_grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;

  StationarityReport stationarity;
  double el_r1_l2 = 0.0;
  double el_r2_l2 = 0.0;
  double bdry_b1 = 0.0;
  double bdry_b2 = 0.0;
  double bdry_b3 = 0.0;
  double airy_ls_residual = 0.0;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic random displacement (splitmix64 stream), uniform in
// [-amplitude, amplitude] per nodal value.
Displacement random_displacement(const Grid2D& grid, std::uint64_t seed, double amplitude);

SolveReport minimize(const PlateProblem& p, const SolveConfig& cfg, const Displacement& init);
SolveReport minimize(const PlateProblem& p, const SolveConfig& cfg);  // random init from seed

// Weak residuals against random polynomial test pairs of degree <= 3,
// normalized by the sampled test-field norms.
StationarityReport stationarity_report(const PlateProblem& p, const Displacement& d, int n_tests,
                                       std::uint64_t seed = 1234);

}  // namespace fvk
