#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "resalloc/cost.hpp"
#include "resalloc/graph.hpp"

namespace resalloc {

/// Dense row-major n x d matrix; row i is agent i.
class StateMatrix {
 public:
  StateMatrix() = default;
  StateMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  StateMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t k) { return data_[i * cols_ + k]; }
  double operator()(std::size_t i, std::size_t k) const { return data_[i * cols_ + k]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  double column_sum(std::size_t k) const;
  bool all_finite() const;

  bool operator==(const StateMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class ProtocolKind { Linear, SignPower, Combined, CombinedVector };

std::string_view kind_name(ProtocolKind kind);

/// Right-hand side selector:
///   Linear          -(eta1 + eta2) sum_j W_ij (psi_i - psi_j)
///   SignPower       -eta1 sum_j W_ij sgn^v1(psi_i - psi_j)
///   Combined        -sum_j W_ij (eta1 sgn^v1(.) + eta2 sgn^v2(.))
///   CombinedVector  Combined with the Euclidean-norm power map on R^dim
struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::Combined;
  double eta1 = 1.0;
  double eta2 = 1.0;
  double v1 = 0.5;
  double v2 = 1.5;
  std::size_t dim = 1;

  static ProtocolSpec linear(double eta1, double eta2 = 0.0);
  static ProtocolSpec sign_power(double eta1, double v);
  static ProtocolSpec combined(double eta1, double eta2, double v1, double v2);
  static ProtocolSpec combined_vector(double eta1, double eta2, double v1, double v2, std::size_t dim);

  std::string label() const;

  bool operator==(const ProtocolSpec&) const = default;
};

/// Field ranges: eta1 > 0, eta2 >= 0, v1 in (0, 1], v2 >= 1, dim >= 1 and
/// dim == 1 unless CombinedVector; Linear pins v1 = v2 = 1; SignPower pins
/// eta2 = 0. Throws Error{InvalidProtocol}.
void validate(const ProtocolSpec& spec);

/// validate() plus the strict regimes: Combined needs 0 < v1 < 1 < v2,
/// SignPower needs v1 < 1.
void validate_strict(const ProtocolSpec& spec);

/// x |x|^(v-1); exactly 0 for |x| < 1e-300. Odd in x, bit for bit.
inline double sgn_pow(double x, double v) {
  const double ax = std::fabs(x);
  if (ax < 1e-300) return 0.0;
  if (v == 1.0) return x;
  return x * std::pow(ax, v - 1.0);
}

/// Euclidean-norm generalization: x ||x||^(v-1), zero vector to zero vector.
/// For a single coordinate it reduces to sgn_pow exactly.
std::vector<double> sgn_pow_vec(std::span<const double> x, double v);

/// Euclidean norm; |x| exactly for one coordinate.
inline double norm(std::span<const double> x) {
  if (x.size() == 1) return std::fabs(x[0]);
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

struct SimState {
  double t = 0.0;
  StateMatrix x;
};

enum class Kernel { Serial, Parallel };

/// Gradient spread: max_i psi_i - min_i psi_i, or the largest pairwise
/// distance between gradient vectors when dim > 1.
double dispersion(const StateMatrix& psi);

/// psi_i = grad f_i(x_i) for every agent and coordinate.
StateMatrix gradients(const CostEnsemble& costs, const StateMatrix& x);

/// Protocol right-hand side. Throws Error{NumericalDivergence} naming the
/// agent when a gradient is not finite; `t` only feeds that diagnostic.
StateMatrix rhs(const ProtocolSpec& spec, const GraphSnapshot& graph, const CostEnsemble& costs,
                const StateMatrix& x, Kernel kernel = Kernel::Serial, double t = 0.0);

/// One explicit Euler step on the snapshot active at state.t.
SimState step(const ProtocolSpec& spec, const GraphSchedule& schedule, const CostEnsemble& costs,
              const SimState& state, double h, Kernel kernel = Kernel::Serial);

struct RunOptions {
  double h = 1e-3;
  double t_end = 1.0;
  std::size_t sample_every = 1;
  /// Early stop once dispersion < stop_tol for stop_patience consecutive
  /// samples; 0 disables it.
  double stop_tol = 0.0;
  std::size_t stop_patience = 3;
  /// Abort with StepTooLarge when F rises by more than
  /// 1e-6 max(1, |F(x0)|) for guard_patience consecutive samples.
  bool lyapunov_guard = true;
  std::size_t guard_patience = 3;
  Kernel kernel = Kernel::Serial;

  bool operator==(const RunOptions&) const = default;
};

enum class RunStatus { Completed, EarlyStopped, Diverged, StepTooLarge };

std::string_view status_name(RunStatus status);

/// Sampled run: the initial state, every sample_every-th step and the final
/// state. Sample times are strictly increasing.
struct Trajectory {
  std::vector<double> times;
  std::vector<StateMatrix> states;
  std::vector<double> costs;
  std::vector<double> dispersions;
  std::size_t steps = 0;
  RunStatus status = RunStatus::Completed;
  std::string diagnostic;

  bool ok() const { return status == RunStatus::Completed || status == RunStatus::EarlyStopped; }
  std::size_t size() const { return times.size(); }
};

/// Lyapunov tolerance used by the guard and by monotonicity checks.
inline double lyapunov_slack(double initial_cost) { return 1e-6 * std::fmax(1.0, std::fabs(initial_cost)); }

/// Integrates from t = 0 to t_end. Every switch time that the run can reach
/// must be an integer multiple of h (Error{ConfigError} otherwise). Divergence
/// and the Lyapunov guard end the run early and are reported through status,
/// keeping the partial trajectory.
Trajectory run(const ProtocolSpec& spec, const GraphSchedule& schedule, const CostEnsemble& costs,
               const StateMatrix& x0, const RunOptions& options);

}  // namespace resalloc
