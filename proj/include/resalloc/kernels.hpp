#pragma once

#include "resalloc/dynamics.hpp"

namespace resalloc::kernels {

// Both kernels evaluate the same per-agent expression in the same order, so
// their outputs are bitwise identical. `psi` must already hold the gradients.

/// Reference implementation, one agent after another.
void rhs_serial(const ProtocolSpec& spec, const GraphSnapshot& graph, const StateMatrix& psi, StateMatrix& out);

/// OpenMP over agents; falls back to one thread below kParallelThreshold
/// agents or when already inside a parallel region.
void rhs_parallel(const ProtocolSpec& spec, const GraphSnapshot& graph, const StateMatrix& psi, StateMatrix& out);

void gradients_serial(const CostEnsemble& costs, const StateMatrix& x, StateMatrix& psi);
void gradients_parallel(const CostEnsemble& costs, const StateMatrix& x, StateMatrix& psi);

inline constexpr std::size_t kParallelThreshold = 64;

}  // namespace resalloc::kernels
