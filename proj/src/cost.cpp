#include "resalloc/cost.hpp"

#include <cmath>
#include <string>

#include "resalloc/errors.hpp"

namespace resalloc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInverseTolerance = 1e-12;
constexpr int kMaxDoublings = 200;

double invert_by_bisection(const CostFunction& f, double psi, double center) {
  double step = 1.0;
  double lo = center - step;
  double hi = center + step;
  int doublings = 0;
  while (grad(f, lo) > psi) {
    if (++doublings > kMaxDoublings) throw Error(ErrorKind::InversionFailure, "lower bracket for psi=" + std::to_string(psi));
    step *= 2.0;
    lo = center - step;
  }
  step = 1.0;
  doublings = 0;
  while (grad(f, hi) < psi) {
    if (++doublings > kMaxDoublings) throw Error(ErrorKind::InversionFailure, "upper bracket for psi=" + std::to_string(psi));
    step *= 2.0;
    hi = center + step;
  }
  while (hi - lo > kInverseTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval below one ulp
    if (grad(f, mid) < psi) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double eval(const CostFunction& f, double x) {
  return std::visit(overloaded{
                        [x](const Quartic& q) {
                          const double u = x - q.a;
                          const double u2 = u * u;
                          return q.b * u2 * u2;
                        },
                        [x](const QuadLse& q) {
                          const double u = x - q.c;
                          return 0.5 * q.a * u * u + softplus(q.b * (x - q.d));
                        },
                        [x](const Quadratic& q) {
                          const double u = x - q.q;
                          return 0.5 * q.p * u * u;
                        },
                    },
                    f);
}

double grad(const CostFunction& f, double x) {
  return std::visit(overloaded{
                        [x](const Quartic& q) {
                          const double u = x - q.a;
                          return 4.0 * q.b * u * u * u;
                        },
                        [x](const QuadLse& q) { return q.a * (x - q.c) + q.b * logistic(q.b * (x - q.d)); },
                        [x](const Quadratic& q) { return q.p * (x - q.q); },
                    },
                    f);
}

double curvature(const CostFunction& f, double x) {
  return std::visit(overloaded{
                        [x](const Quartic& q) {
                          const double u = x - q.a;
                          return 12.0 * q.b * u * u;
                        },
                        [x](const QuadLse& q) {
                          const double s = logistic(q.b * (x - q.d));
                          return q.a + q.b * q.b * s * (1.0 - s);
                        },
                        [](const Quadratic& q) { return q.p; },
                    },
                    f);
}

double grad_inverse(const CostFunction& f, double psi) {
  if (!std::isfinite(psi)) throw Error(ErrorKind::InversionFailure, "non-finite psi");
  return std::visit(overloaded{
                        [psi](const Quartic& q) { return q.a + std::cbrt(psi / (4.0 * q.b)); },
                        [&f, psi](const QuadLse& q) { return invert_by_bisection(f, psi, q.c); },
                        [psi](const Quadratic& q) { return q.q + psi / q.p; },
                    },
                    f);
}

double unconstrained_minimizer(const CostFunction& f) { return grad_inverse(f, 0.0); }

CostFamily family_of(const CostFunction& f) {
  return std::visit(overloaded{
                        [](const Quartic&) { return CostFamily::Quartic; },
                        [](const QuadLse&) { return CostFamily::QuadLse; },
                        [](const Quadratic&) { return CostFamily::Quadratic; },
                    },
                    f);
}

std::string_view family_name(CostFamily family) {
  switch (family) {
    case CostFamily::Quartic: return "quartic";
    case CostFamily::QuadLse: return "quadlse";
    case CostFamily::Quadratic: return "quadratic";
  }
  return "unknown";
}

void check_strictly_convex(const CostFunction& f) {
  const auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigError, what); };
  std::visit(overloaded{
                 [&](const Quartic& q) {
                   if (!std::isfinite(q.a) || !std::isfinite(q.b)) fail("quartic parameters must be finite");
                   if (!(q.b > 0.0)) fail("quartic b must be > 0");
                 },
                 [&](const QuadLse& q) {
                   if (!std::isfinite(q.a) || !std::isfinite(q.b) || !std::isfinite(q.c) || !std::isfinite(q.d)) {
                     fail("quadlse parameters must be finite");
                   }
                   if (!(q.a > 0.0)) fail("quadlse a must be > 0");
                 },
                 [&](const Quadratic& q) {
                   if (!std::isfinite(q.p) || !std::isfinite(q.q)) fail("quadratic parameters must be finite");
                   if (!(q.p > 0.0)) fail("quadratic p must be > 0");
                 },
             },
             f);
}

CostEnsemble::CostEnsemble(std::vector<CostFunction> costs, std::size_t dim) : dim_(dim), costs_(std::move(costs)) {
  if (dim_ == 0 || costs_.empty() || costs_.size() % dim_ != 0) {
    throw Error(ErrorKind::DimensionMismatch, "cost ensemble needs a nonempty multiple of dim entries");
  }
  agents_ = costs_.size() / dim_;
  for (const CostFunction& f : costs_) check_strictly_convex(f);
}

CostEnsemble CostEnsemble::coordinate(std::size_t k) const {
  std::vector<CostFunction> col;
  col.reserve(agents_);
  for (std::size_t i = 0; i < agents_; ++i) col.push_back(at(i, k));
  return CostEnsemble(std::move(col), 1);
}

double CostEnsemble::total(std::span<const double> x) const {
  if (x.size() != costs_.size()) throw Error(ErrorKind::DimensionMismatch, "state size does not match ensemble");
  double s = 0.0;
  for (std::size_t k = 0; k < costs_.size(); ++k) s += eval(costs_[k], x[k]);
  return s;
}

CostRanges CostRanges::defaults(CostFamily family) {
  switch (family) {
    case CostFamily::Quartic:
      return {.lead_lo = 0.0, .lead_hi = 5.0, .p2_lo = -2.0, .p2_hi = 8.0, .resample = true};
    case CostFamily::QuadLse:
      return {.lead_lo = 0.0, .lead_hi = 2.0, .p2_lo = -2.0, .p2_hi = 2.0, .p3_lo = -3.0, .p3_hi = 3.0,
              .p4_lo = -3.0, .p4_hi = 3.0};
    case CostFamily::Quadratic:
      return {.lead_lo = 0.5, .lead_hi = 2.0, .p2_lo = -3.0, .p2_hi = 3.0};
  }
  return {.lead_lo = 1.0, .lead_hi = 1.0};
}

CostEnsemble random_ensemble(CostFamily family, std::size_t agents, std::size_t dim, const CostRanges& r,
                             Rng& rng) {
  std::vector<CostFunction> costs;
  costs.reserve(agents * dim);
  const auto lead = [&] {
    double v = rng.uniform(r.lead_lo, r.lead_hi);
    if (r.resample && r.lead_hi > r.floor) {
      while (v < r.floor) v = rng.uniform(r.lead_lo, r.lead_hi);
    }
    return v < r.floor ? r.floor : v;
  };
  for (std::size_t k = 0; k < agents * dim; ++k) {
    switch (family) {
      case CostFamily::Quartic: {
        const double b = lead();
        costs.push_back(Quartic{b, rng.uniform(r.p2_lo, r.p2_hi)});
        break;
      }
      case CostFamily::QuadLse: {
        const double a = lead();
        const double b = rng.uniform(r.p2_lo, r.p2_hi);
        const double c = rng.uniform(r.p3_lo, r.p3_hi);
        costs.push_back(QuadLse{a, b, c, rng.uniform(r.p4_lo, r.p4_hi)});
        break;
      }
      case CostFamily::Quadratic: {
        const double p = lead();
        costs.push_back(Quadratic{p, rng.uniform(r.p2_lo, r.p2_hi)});
        break;
      }
    }
  }
  return CostEnsemble(std::move(costs), dim);
}

}  // namespace resalloc
