// Problem data for the variable-thickness prestrained plate: analytic
// thickness pair and growth tensor, material, grid, and the sampled
// fields every assembly reuses.
#pragma once

#include <memory>

#include "fvk/expr.hpp"
#include "fvk/grid.hpp"
#include "fvk/material.hpp"
#include "fvk/operators.hpp"

namespace fvk {

// Half-thickness profiles g1 (below) and g2 (above), strictly positive
// on the closure of the domain.
struct ThicknessPair {
  Expr g1 = Expr::constant(0.5);
  Expr g2 = Expr::constant(0.5);
};

// Instantaneous growth a^h = Id + h^2 eps(x') + h x3 kappa(x').
struct GrowthTensor {
  ExprMat3 eps;    // default: all zero
  ExprMat3 kappa;  // default: all zero
};

struct Displacement {
  Vector2Field w;  // in-plane
  ScalarField v;   // out-of-plane

  Displacement() = default;
  explicit Displacement(const Grid2D& g) : w(g), v(g) {}
};

class PlateProblem {
 public:
  PlateProblem(const Grid2D& grid, const LameMaterial& mat, const ThicknessPair& thickness,
               const GrowthTensor& growth);

  const Grid2D& grid() const { return grid_; }
  const LameMaterial& material() const { return mat_; }
  const ThicknessPair& thickness() const { return thickness_; }
  const GrowthTensor& growth() const { return growth_; }
  const GridOperators& ops() const { return *ops_; }

  // Sampled once at construction.
  const ScalarField& g_sum() const { return g_sum_; }         // g1 + g2
  const ScalarField& g_diff() const { return g_diff_; }       // g2 - g1
  const ScalarField& g_sum_cubed() const { return g_sum3_; }
  const Vector2Field& grad_g_diff() const { return grad_g_diff_; }  // exact
  const Matrix2Field& sym_eps_2x2() const { return sym_eps_; }
  const Matrix2Field& sym_kappa_2x2() const { return sym_kappa_; }
  const ScalarField& weights() const { return weights_; }

 private:
  Grid2D grid_;
  LameMaterial mat_;
  ThicknessPair thickness_;
  GrowthTensor growth_;
  std::shared_ptr<const GridOperators> ops_;
  ScalarField g_sum_, g_diff_, g_sum3_, weights_;
  Vector2Field grad_g_diff_;
  Matrix2Field sym_eps_, sym_kappa_;
};

}  // namespace fvk
