#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "resalloc/rng.hpp"

namespace resalloc {

/// f(x) = b (x - a)^4, b > 0. Curvature vanishes at x = a but the gradient
/// is still strictly increasing.
struct Quartic {
  double b;
  double a;

  bool operator==(const Quartic&) const = default;
};

/// f(x) = a/2 (x - c)^2 + log(1 + exp(b (x - d))), a > 0.
struct QuadLse {
  double a;
  double b;
  double c;
  double d;

  bool operator==(const QuadLse&) const = default;
};

/// f(x) = p/2 (x - q)^2, p > 0.
struct Quadratic {
  double p;
  double q;

  bool operator==(const Quadratic&) const = default;
};

using CostFunction = std::variant<Quartic, QuadLse, Quadratic>;

enum class CostFamily { Quartic, QuadLse, Quadratic };

double eval(const CostFunction& f, double x);
double grad(const CostFunction& f, double x);
double curvature(const CostFunction& f, double x);

/// Unique x with grad(f, x) == psi. Closed form for Quartic and Quadratic,
/// bracketed bisection (absolute tolerance 1e-12 on x) for QuadLse.
/// Throws Error{InversionFailure} if the bracket cannot be found.
double grad_inverse(const CostFunction& f, double psi);

/// Minimizer of f without the resource constraint.
double unconstrained_minimizer(const CostFunction& f);

CostFamily family_of(const CostFunction& f);
std::string_view family_name(CostFamily family);

/// Throws Error{ConfigError} when the leading coefficient is not strictly
/// positive or any parameter is non-finite.
void check_strictly_convex(const CostFunction& f);

double softplus(double z);
double logistic(double z);

/// Per-agent costs. With dim > 1 every agent carries one cost per coordinate
/// (separable), stored agent-major: costs[i * dim + k].
class CostEnsemble {
 public:
  CostEnsemble() = default;
  explicit CostEnsemble(std::vector<CostFunction> costs, std::size_t dim = 1);

  std::size_t agents() const noexcept { return agents_; }
  std::size_t dim() const noexcept { return dim_; }
  const CostFunction& at(std::size_t agent, std::size_t coord = 0) const { return costs_[agent * dim_ + coord]; }
  std::span<const CostFunction> all() const noexcept { return costs_; }

  /// Scalar ensemble of coordinate k.
  CostEnsemble coordinate(std::size_t k) const;

  /// F(x) = sum_i f_i(x_i); x is agent-major n x dim.
  double total(std::span<const double> x) const;

  bool operator==(const CostEnsemble&) const = default;

 private:
  std::size_t agents_ = 0;
  std::size_t dim_ = 1;
  std::vector<CostFunction> costs_;
};

/// Sampling ranges for randomly generated ensembles. Leading coefficients
/// below `floor` are redrawn (or raised to `floor` when `resample` is off) so
/// every cost stays strictly convex.
struct CostRanges {
  double lead_lo;
  double lead_hi;
  double p2_lo = 0.0;
  double p2_hi = 0.0;
  double p3_lo = 0.0;
  double p3_hi = 0.0;
  double p4_lo = 0.0;
  double p4_hi = 0.0;
  double floor = 1e-3;
  bool resample = false;

  static CostRanges defaults(CostFamily family);

  bool operator==(const CostRanges&) const = default;
};

CostEnsemble random_ensemble(CostFamily family, std::size_t agents, std::size_t dim, const CostRanges& ranges,
                             Rng& rng);

}  // namespace resalloc
