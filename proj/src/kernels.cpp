#include "resalloc/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace resalloc::kernels {

namespace {

template <ProtocolKind K>
inline void scalar_row(const ProtocolSpec& s, const GraphSnapshot& g, const StateMatrix& psi, StateMatrix& out,
                       std::size_t i) {
  const double pi = psi(i, 0);
  double acc = 0.0;
  for (const Neighbor& nb : g.neighbors(i)) {
    const double d = pi - psi(nb.index, 0);
    double f;
    if constexpr (K == ProtocolKind::Linear) {
      f = (s.eta1 + s.eta2) * d;
    } else if constexpr (K == ProtocolKind::SignPower) {
      f = s.eta1 * sgn_pow(d, s.v1);
    } else {
      f = s.eta1 * sgn_pow(d, s.v1);
      if (s.eta2 != 0.0) f += s.eta2 * sgn_pow(d, s.v2);
    }
    acc += nb.weight * f;
  }
  out(i, 0) = -acc;
}

// scratch holds 2 * dim doubles: the difference vector and the accumulator.
inline void vector_row(const ProtocolSpec& s, const GraphSnapshot& g, const StateMatrix& psi, StateMatrix& out,
                       std::size_t i, std::span<double> scratch) {
  const std::size_t dim = psi.cols();
  const std::span<double> diff = scratch.first(dim);
  const std::span<double> acc = scratch.subspan(dim, dim);
  std::fill(acc.begin(), acc.end(), 0.0);
  for (const Neighbor& nb : g.neighbors(i)) {
    for (std::size_t k = 0; k < dim; ++k) diff[k] = psi(i, k) - psi(nb.index, k);
    const double r = norm(diff);
    if (r < 1e-300) continue;
    const double s1 = s.v1 == 1.0 ? 1.0 : std::pow(r, s.v1 - 1.0);
    const double s2 = s.v2 == 1.0 ? 1.0 : std::pow(r, s.v2 - 1.0);
    for (std::size_t k = 0; k < dim; ++k) {
      double f = s.eta1 * (diff[k] * s1);
      if (s.eta2 != 0.0) f += s.eta2 * (diff[k] * s2);
      acc[k] += nb.weight * f;
    }
  }
  for (std::size_t k = 0; k < dim; ++k) out(i, k) = -acc[k];
}

inline void any_row(const ProtocolSpec& s, const GraphSnapshot& g, const StateMatrix& psi, StateMatrix& out,
                    std::size_t i, std::span<double> scratch) {
  switch (s.kind) {
    case ProtocolKind::Linear: scalar_row<ProtocolKind::Linear>(s, g, psi, out, i); break;
    case ProtocolKind::SignPower: scalar_row<ProtocolKind::SignPower>(s, g, psi, out, i); break;
    case ProtocolKind::Combined: scalar_row<ProtocolKind::Combined>(s, g, psi, out, i); break;
    case ProtocolKind::CombinedVector: vector_row(s, g, psi, out, i, scratch); break;
  }
}

void prepare(const GraphSnapshot& g, const StateMatrix& psi, StateMatrix& out) {
  if (g.size() != psi.rows()) throw Error(ErrorKind::DimensionMismatch, "graph and state disagree on n");
  if (out.rows() != psi.rows() || out.cols() != psi.cols()) out = StateMatrix(psi.rows(), psi.cols());
}

}  // namespace

void rhs_serial(const ProtocolSpec& spec, const GraphSnapshot& graph, const StateMatrix& psi, StateMatrix& out) {
  prepare(graph, psi, out);
  std::vector<double> scratch(2 * psi.cols());
  for (std::size_t i = 0; i < psi.rows(); ++i) any_row(spec, graph, psi, out, i, scratch);
}

void rhs_parallel(const ProtocolSpec& spec, const GraphSnapshot& graph, const StateMatrix& psi, StateMatrix& out) {
  prepare(graph, psi, out);
  const auto n = static_cast<std::ptrdiff_t>(psi.rows());
  const bool fan_out = psi.rows() >= kParallelThreshold && !omp_in_parallel();
#pragma omp parallel if (fan_out)
  {
    std::vector<double> scratch(2 * psi.cols());
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) any_row(spec, graph, psi, out, static_cast<std::size_t>(i), scratch);
  }
}

void gradients_serial(const CostEnsemble& costs, const StateMatrix& x, StateMatrix& psi) {
  if (psi.rows() != x.rows() || psi.cols() != x.cols()) psi = StateMatrix(x.rows(), x.cols());
  const auto xs = x.data();
  const auto ps = psi.data();
  const auto fs = costs.all();
  for (std::size_t k = 0; k < xs.size(); ++k) ps[k] = grad(fs[k], xs[k]);
}

void gradients_parallel(const CostEnsemble& costs, const StateMatrix& x, StateMatrix& psi) {
  if (psi.rows() != x.rows() || psi.cols() != x.cols()) psi = StateMatrix(x.rows(), x.cols());
  const auto xs = x.data();
  const auto ps = psi.data();
  const auto fs = costs.all();
  const auto m = static_cast<std::ptrdiff_t>(xs.size());
  const bool fan_out = x.rows() >= kParallelThreshold && !omp_in_parallel();
#pragma omp parallel for schedule(static) if (fan_out)
  for (std::ptrdiff_t k = 0; k < m; ++k) ps[k] = grad(fs[k], xs[k]);
}

}  // namespace resalloc::kernels
