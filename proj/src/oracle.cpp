#include "resalloc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "resalloc/errors.hpp"

namespace resalloc {

namespace {

constexpr int kMaxDoublings = 200;
constexpr int kMaxBisections = 4000;

double allocation(const CostEnsemble& costs, double psi) {
  double s = 0.0;
  for (const CostFunction& f : costs.all()) s += grad_inverse(f, psi);
  return s;
}

}  // namespace

KktSolution solve_kkt(const CostEnsemble& costs, double K) {
  if (costs.dim() != 1) throw Error(ErrorKind::OracleFailure, "solve_kkt needs a scalar ensemble");
  if (!std::isfinite(K)) throw Error(ErrorKind::OracleFailure, "K is not finite");

  const double target_tol = 1e-12 * std::max(1.0, std::fabs(K));
  const auto excess = [&](double psi) { return allocation(costs, psi) - K; };

  double lo = 0.0;
  double hi = 0.0;
  double psi = 0.0;
  const double e0 = excess(0.0);
  if (std::fabs(e0) > target_tol) {
    // The allocation is nondecreasing in psi: move away from 0 until the sign flips.
    const double dir = e0 < 0.0 ? 1.0 : -1.0;
    double near = 0.0;
    double far = dir;
    int doublings = 0;
    while (dir * excess(far) < 0.0) {
      if (++doublings > kMaxDoublings) throw Error(ErrorKind::OracleFailure, "multiplier bracket did not close");
      near = far;
      far *= 2.0;
    }
    lo = std::min(near, far);
    hi = std::max(near, far);
    psi = 0.5 * (lo + hi);
    for (int it = 0; it < kMaxBisections; ++it) {
      psi = 0.5 * (lo + hi);
      const double e = excess(psi);
      if (std::fabs(e) <= target_tol) break;
      if (psi <= lo || psi >= hi) break;
      if (e < 0.0) {
        lo = psi;
      } else {
        hi = psi;
      }
    }
  }

  KktSolution sol;
  sol.psi_star = psi;
  sol.x_star.reserve(costs.agents());
  double sum = 0.0;
  for (const CostFunction& f : costs.all()) {
    sol.x_star.push_back(grad_inverse(f, psi));
    sum += sol.x_star.back();
  }
  sol.f_star = costs.total(sol.x_star);
  sol.residual = std::fabs(sum - K);
  if (!std::isfinite(sol.f_star)) throw Error(ErrorKind::OracleFailure, "optimal cost is not finite");
  return sol;
}

std::vector<KktSolution> solve_kkt_separable(const CostEnsemble& costs, std::span<const double> K) {
  if (K.size() != costs.dim()) throw Error(ErrorKind::DimensionMismatch, "need one resource total per coordinate");
  std::vector<KktSolution> out;
  for (std::size_t k = 0; k < costs.dim(); ++k) out.push_back(solve_kkt(costs.coordinate(k), K[k]));
  return out;
}

namespace {

struct Lattice {
  double lo;
  std::size_t count;
  std::vector<double> values;  // f_i(lo + k grid)
};

struct Search {
  const std::vector<Lattice>& free;
  const std::vector<double>& last;  // f_n(K - base - m grid) indexed by m
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx;
  std::vector<std::size_t> best_idx;
  std::size_t evaluated = 0;

  void descend(std::size_t depth, std::size_t offset, double partial) {
    const Lattice& lat = free[depth];
    if (depth + 1 == free.size()) {
      for (std::size_t k = 0; k < lat.count; ++k) {
        const double f = partial + lat.values[k] + last[offset + k];
        if (f < best) {
          best = f;
          idx[depth] = k;
          best_idx = idx;
        }
      }
      evaluated += lat.count;
      return;
    }
    for (std::size_t k = 0; k < lat.count; ++k) {
      idx[depth] = k;
      descend(depth + 1, offset + k, partial + lat.values[k]);
    }
  }
};

}  // namespace

GridMinimum brute_force_check(const CostEnsemble& costs, double K, double grid) {
  if (costs.dim() != 1) throw Error(ErrorKind::ConfigError, "brute force needs a scalar ensemble");
  const std::size_t n = costs.agents();
  if (n > 4) throw Error(ErrorKind::ConfigError, "brute force is limited to n <= 4");
  if (!(grid > 0.0)) throw Error(ErrorKind::ConfigError, "grid must be > 0");

  GridMinimum out;
  if (n == 1) {
    out.x = {K};
    out.f = eval(costs.at(0), K);
    out.evaluated = 1;
    return out;
  }

  const double uniform = K / static_cast<double>(n);
  double psi_lo = std::numeric_limits<double>::infinity();
  double psi_hi = -std::numeric_limits<double>::infinity();
  for (const CostFunction& f : costs.all()) {
    const double g = grad(f, uniform);
    psi_lo = std::min(psi_lo, g);
    psi_hi = std::max(psi_hi, g);
  }

  const double margin = 10.0 * grid;
  std::vector<Lattice> free;
  double base = 0.0;
  std::size_t span_total = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const CostFunction& f = costs.at(i);
    const double lo = grad_inverse(f, psi_lo) - margin;
    const double hi = grad_inverse(f, psi_hi) + margin;
    Lattice lat;
    lat.lo = lo;
    lat.count = static_cast<std::size_t>(std::ceil((hi - lo) / grid)) + 1;
    lat.values.resize(lat.count);
    for (std::size_t k = 0; k < lat.count; ++k) lat.values[k] = eval(f, lo + static_cast<double>(k) * grid);
    base += lo;
    span_total += lat.count - 1;
    free.push_back(std::move(lat));
  }

  std::vector<double> last(span_total + 1);
  const CostFunction& fl = costs.at(n - 1);
  for (std::size_t m = 0; m <= span_total; ++m) last[m] = eval(fl, K - (base + static_cast<double>(m) * grid));

  Search search{free, last, std::numeric_limits<double>::infinity(), std::vector<std::size_t>(free.size(), 0),
                std::vector<std::size_t>(free.size(), 0), 0};
  search.descend(0, 0, 0.0);

  out.f = search.best;
  out.evaluated = search.evaluated;
  std::size_t m = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.x.push_back(free[i].lo + static_cast<double>(search.best_idx[i]) * grid);
    m += search.best_idx[i];
  }
  out.x.push_back(K - (base + static_cast<double>(m) * grid));
  return out;
}

}  // namespace resalloc
