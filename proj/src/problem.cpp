#include "fvk/problem.hpp"

#include <stdexcept>

namespace fvk {

PlateProblem::PlateProblem(const Grid2D& grid, const LameMaterial& mat,
                           const ThicknessPair& thickness, const GrowthTensor& growth)
    : grid_(grid),
      mat_(mat),
      thickness_(thickness),
      growth_(growth),
      ops_(std::make_shared<GridOperators>(grid)) {
  const ScalarField g1 = sample(thickness_.g1, grid_);
  const ScalarField g2 = sample(thickness_.g2, grid_);
  for (int k = 0; k < g1.size(); ++k)
    if (!(g1[k] > 0.0) || !(g2[k] > 0.0))
      throw std::invalid_argument("PlateProblem: thickness must be positive on the grid");

  g_sum_ = ScalarField(grid_);
  g_diff_ = ScalarField(grid_);
  g_sum3_ = ScalarField(grid_);
  for (int k = 0; k < g1.size(); ++k) {
    g_sum_[k] = g1[k] + g2[k];
    g_diff_[k] = g2[k] - g1[k];
    g_sum3_[k] = g_sum_[k] * g_sum_[k] * g_sum_[k];
  }

  const Expr diff = thickness_.g2 - thickness_.g1;
  grad_g_diff_ = sample(grad(diff), grid_);

  sym_eps_ = sample(block_2x2(sym3(growth_.eps)), grid_);
  sym_kappa_ = sample(block_2x2(sym3(growth_.kappa)), grid_);
  weights_ = trapezoid_weights(grid_);
}

}  // namespace fvk
