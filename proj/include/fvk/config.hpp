// Sectioned key-value problem configuration: parsing with per-line
// diagnostics, defaults, a canonical echo that reproduces runs, and
// constructors for the problem objects.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "fvk/gamma.hpp"
#include "fvk/problem.hpp"
#include "fvk/solver.hpp"

namespace fvk {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::vector<std::string>& errors);
  std::vector<std::string> errors;
};

struct ProblemConfig {
  // [grid]
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  int nx = 33, ny = 33;
  // [material]
  double mu = 1.0, lambda = 1.0;
  // [thickness]
  std::string g1_text = "0.5";
  std::string g2_text = "0.5";
  Expr g1 = Expr::constant(0.5);
  Expr g2 = Expr::constant(0.5);
  // [growth] (defaults: zero)
  std::array<std::string, 9> eps_text;
  std::array<std::string, 9> kappa_text;
  ExprMat3 eps;
  ExprMat3 kappa;
  bool eps_is_zero = true;
  bool kappa_is_zero = true;
  // [solver]
  SolveConfig solver;
  // [gamma]
  std::vector<double> h_list = {0.08, 0.04, 0.02, 0.01};
  int n_inplane = 65;
  int n_thickness = 4;
  int n_reference = 129;
  // [displacement]
  bool has_displacement = false;
  std::string w1_text = "0";
  std::string w2_text = "0";
  std::string v_text = "0";
  ExprVec2 w_expr;
  Expr v_expr;

  ProblemConfig();
};

// Parses and fully validates the text; collects every problem (unknown
// keys, malformed numbers or expressions, non-positive thickness,
// inconsistent grid bounds) into a ConfigError with line numbers.
ProblemConfig parse_config(const std::string& text);
ProblemConfig parse_config_file(const std::string& path);

// Canonical text with all defaults filled; parsing it again reproduces
// the configuration (expressions are re-emitted in canonical form).
std::string echo_config(const ProblemConfig& cfg);

Grid2D make_grid(const ProblemConfig& cfg);
PlateProblem make_problem(const ProblemConfig& cfg);
AnalyticDisplacement make_displacement(const ProblemConfig& cfg);

}  // namespace fvk
