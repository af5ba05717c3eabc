#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resalloc/config.hpp"
#include "resalloc/cost.hpp"
#include "resalloc/dynamics.hpp"
#include "resalloc/graph.hpp"
#include "resalloc/oracle.hpp"

namespace resalloc {

/// Fully materialized scenario: every random draw already made.
struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  GraphSchedule schedule;
  CostEnsemble costs;
  std::vector<double> K;  // one total per coordinate
  ProtocolSpec spec;
  StateMatrix x0;
  RunOptions options;
  std::vector<std::string> notes;  // adjustments made while building (rounded durations, ...)

  std::size_t agents() const { return x0.rows(); }
  std::size_t dim() const { return x0.cols(); }

  bool operator==(const Scenario&) const = default;
};

/// Draws streams in the fixed order weights/topology, costs, initials,
/// deletions. Throws Error{ConfigError | InvalidProtocol | InfeasibleInitial}.
Scenario build_scenario(const ScenarioConfig& config);

/// Optimum of a (possibly separable vector) scenario: one KKT solve per
/// coordinate.
struct OracleSolution {
  std::vector<KktSolution> coords;
  double f_star = 0.0;

  double psi_star(std::size_t k = 0) const { return coords[k].psi_star; }
  double residual() const;
};

OracleSolution solve_oracle(const CostEnsemble& costs, std::span<const double> K);
inline OracleSolution solve_oracle(const Scenario& s) { return solve_oracle(s.costs, s.K); }

struct MetricSample {
  double t = 0.0;
  double cost = 0.0;
  double suboptimality = 0.0;      // F - F*, clamped at -1e-8
  double raw_suboptimality = 0.0;  // unclamped
  double dispersion = 0.0;
  double feasibility_drift = 0.0;  // max_k |sum_i x_ik - K_k|
};

MetricSample measure(const StateMatrix& x, const CostEnsemble& costs, std::span<const double> K,
                     const OracleSolution& oracle, double t = 0.0);

/// Metrics for every sample of a trajectory.
std::vector<MetricSample> measure_all(const Trajectory& traj, std::span<const double> K,
                                      const OracleSolution& oracle);

inline constexpr std::array<double, 3> kEpsilons{1e-1, 1e-2, 1e-3};

/// First sample time with suboptimality <= eps max(1, |F*|).
std::optional<double> time_to_eps(std::span<const MetricSample> samples, double f_star, double eps);

struct ProtocolRun {
  ProtocolSpec spec;
  Trajectory trajectory;
  std::vector<MetricSample> metrics;
  std::array<std::optional<double>, 3> time_to{};  // indexed like kEpsilons
  std::string error;                              // set when the protocol could not run at all

  bool ok() const { return error.empty() && trajectory.ok(); }
};

struct ComparisonReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t agents = 0;
  double h = 0.0;
  double sample_interval = 0.0;
  bool normalized = false;
  OracleSolution oracle;
  std::vector<ProtocolRun> runs;
};

/// One run of the scenario's own protocol.
ProtocolRun run_scenario(const Scenario& scenario, const OracleSolution& oracle);

/// Runs every spec on identical inputs (x0, schedule, costs, h). Specs run
/// concurrently; a failing spec is recorded in its ProtocolRun only.
/// `normalize` divides every snapshot by its maximum row sum first.
ComparisonReport compare(const Scenario& scenario, std::span<const ProtocolSpec> specs, bool normalize = false);

/// Linear and SignPower baselines at the reference's eta1 (and v1 for
/// SignPower), followed by the reference itself.
std::vector<ProtocolSpec> default_comparison(const ProtocolSpec& reference);

// Built-in scenarios.

std::vector<std::string> builtin_names();
/// Throws Error{ConfigError} for an unknown name.
ScenarioConfig builtin_config(std::string_view name);

Scenario reference_scenario_cycle();
Scenario reference_scenario_switching();

}  // namespace resalloc
