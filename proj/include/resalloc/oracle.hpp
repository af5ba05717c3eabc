#pragma once

#include <span>
#include <vector>

#include "resalloc/cost.hpp"

namespace resalloc {

/// Constrained optimum of min sum_i f_i(x_i) s.t. sum_i x_i = K.
struct KktSolution {
  std::vector<double> x_star;
  double psi_star = 0.0;
  double f_star = 0.0;
  double residual = 0.0;  // |sum x* - K|
};

/// Finds the common multiplier psi* with sum_i grad_inverse(f_i, psi*) = K by
/// bisection. The bracket grows geometrically from psi = 0 (+-1, +-2, +-4,
/// ...); bisection stops once |sum - K| <= 1e-12 max(1,|K|) or the psi
/// interval can no longer be split in double precision.
/// Requires a scalar ensemble. Throws Error{OracleFailure}.
KktSolution solve_kkt(const CostEnsemble& costs, double K);

/// One independent solve per coordinate of a separable ensemble.
std::vector<KktSolution> solve_kkt_separable(const CostEnsemble& costs, std::span<const double> K);

struct GridMinimum {
  std::vector<double> x;
  double f = 0.0;
  std::size_t evaluated = 0;
};

/// Exhaustive minimization over the feasible slice: x_1..x_{n-1} on a lattice
/// of spacing `grid`, x_n = K - sum. The search box for agent i is
/// [g_i^-1(psi_lo), g_i^-1(psi_hi)] padded by 10 grid steps, where psi_lo and
/// psi_hi are the smallest and largest gradients at the uniform split K/n
/// (the optimal multiplier always lies between them). Cost grows like
/// (width/grid)^(n-1); n is limited to 4.
GridMinimum brute_force_check(const CostEnsemble& costs, double K, double grid);

}  // namespace resalloc
