#include "resalloc/dynamics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>

#include "resalloc/errors.hpp"
#include "resalloc/kernels.hpp"

namespace resalloc {

StateMatrix::StateMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw Error(ErrorKind::DimensionMismatch, "state data does not match shape");
}

double StateMatrix::column_sum(std::size_t k) const {
  double s = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, k);
  return s;
}

bool StateMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string_view kind_name(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Linear: return "linear";
    case ProtocolKind::SignPower: return "sign-power";
    case ProtocolKind::Combined: return "combined";
    case ProtocolKind::CombinedVector: return "combined-vector";
  }
  return "unknown";
}

ProtocolSpec ProtocolSpec::linear(double eta1, double eta2) {
  return {ProtocolKind::Linear, eta1, eta2, 1.0, 1.0, 1};
}

ProtocolSpec ProtocolSpec::sign_power(double eta1, double v) {
  return {ProtocolKind::SignPower, eta1, 0.0, v, 1.0, 1};
}

ProtocolSpec ProtocolSpec::combined(double eta1, double eta2, double v1, double v2) {
  return {ProtocolKind::Combined, eta1, eta2, v1, v2, 1};
}

ProtocolSpec ProtocolSpec::combined_vector(double eta1, double eta2, double v1, double v2, std::size_t dim) {
  return {ProtocolKind::CombinedVector, eta1, eta2, v1, v2, dim};
}

std::string ProtocolSpec::label() const {
  char buf[160];
  switch (kind) {
    case ProtocolKind::Linear:
      std::snprintf(buf, sizeof buf, "linear(eta=%g)", eta1 + eta2);
      break;
    case ProtocolKind::SignPower:
      std::snprintf(buf, sizeof buf, "sign-power(eta1=%g,v=%g)", eta1, v1);
      break;
    case ProtocolKind::Combined:
      std::snprintf(buf, sizeof buf, "combined(eta1=%g,eta2=%g,v1=%g,v2=%g)", eta1, eta2, v1, v2);
      break;
    case ProtocolKind::CombinedVector:
      std::snprintf(buf, sizeof buf, "combined-vector(eta1=%g,eta2=%g,v1=%g,v2=%g,d=%zu)", eta1, eta2, v1, v2, dim);
      break;
  }
  return buf;
}

void validate(const ProtocolSpec& s) {
  const auto fail = [&](const char* what) { throw Error(ErrorKind::InvalidProtocol, s.label() + ": " + what); };
  if (!(s.eta1 > 0.0) || !std::isfinite(s.eta1)) fail("eta1 must be > 0");
  if (!(s.eta2 >= 0.0) || !std::isfinite(s.eta2)) fail("eta2 must be >= 0");
  if (!(s.v1 > 0.0 && s.v1 <= 1.0)) fail("v1 must lie in (0, 1]");
  if (!(s.v2 >= 1.0) || !std::isfinite(s.v2)) fail("v2 must be >= 1");
  if (s.dim == 0) fail("dim must be >= 1");
  if (s.kind != ProtocolKind::CombinedVector && s.dim != 1) fail("dim > 1 requires combined-vector");
  if (s.kind == ProtocolKind::Linear && (s.v1 != 1.0 || s.v2 != 1.0)) fail("linear fixes v1 = v2 = 1");
  if (s.kind == ProtocolKind::SignPower && s.eta2 != 0.0) fail("sign-power requires eta2 = 0");
}

void validate_strict(const ProtocolSpec& s) {
  validate(s);
  const auto fail = [&](const char* what) { throw Error(ErrorKind::InvalidProtocol, s.label() + ": " + what); };
  if ((s.kind == ProtocolKind::Combined || s.kind == ProtocolKind::CombinedVector) && !(s.v1 < 1.0 && s.v2 > 1.0)) {
    fail("combined requires 0 < v1 < 1 < v2");
  }
  if (s.kind == ProtocolKind::SignPower && !(s.v1 < 1.0)) fail("sign-power requires 0 < v < 1");
}

std::vector<double> sgn_pow_vec(std::span<const double> x, double v) {
  std::vector<double> out(x.size(), 0.0);
  const double r = norm(x);
  if (r < 1e-300) return out;
  const double scale = v == 1.0 ? 1.0 : std::pow(r, v - 1.0);
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] * scale;
  return out;
}

std::string_view status_name(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::EarlyStopped: return "early-stopped";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::StepTooLarge: return "step-too-large";
  }
  return "unknown";
}

double dispersion(const StateMatrix& psi) {
  const std::size_t n = psi.rows();
  if (n == 0) return 0.0;
  if (psi.cols() == 1) {
    const auto d = psi.data();
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    return *hi - *lo;
  }
  double best = 0.0;
  std::vector<double> diff(psi.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < psi.cols(); ++k) diff[k] = psi(i, k) - psi(j, k);
      best = std::max(best, norm(diff));
    }
  }
  return best;
}

namespace {

void check_shapes(const CostEnsemble& costs, const StateMatrix& x) {
  if (costs.agents() != x.rows() || costs.dim() != x.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "state is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                                                  ", costs are " + std::to_string(costs.agents()) + "x" +
                                                  std::to_string(costs.dim()));
  }
}

void check_spec_shape(const ProtocolSpec& spec, const StateMatrix& x) {
  if (spec.dim != x.cols()) throw Error(ErrorKind::DimensionMismatch, "protocol dim does not match state columns");
}

// psi and out are caller-owned buffers reused across steps.
void evaluate_rhs(const ProtocolSpec& spec, const GraphSnapshot& graph, const CostEnsemble& costs,
                  const StateMatrix& x, Kernel kernel, double t, StateMatrix& psi, StateMatrix& out) {
  if (kernel == Kernel::Parallel) {
    kernels::gradients_parallel(costs, x, psi);
  } else {
    kernels::gradients_serial(costs, x, psi);
  }
  const auto p = psi.data();
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!std::isfinite(p[k])) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "gradient of agent %zu is not finite at t=%.17g", k / psi.cols(), t);
      throw Error(ErrorKind::NumericalDivergence, buf);
    }
  }
  if (kernel == Kernel::Parallel) {
    kernels::rhs_parallel(spec, graph, psi, out);
  } else {
    kernels::rhs_serial(spec, graph, psi, out);
  }
}

void axpy(double h, const StateMatrix& dx, StateMatrix& x) {
  const auto d = dx.data();
  const auto xs = x.data();
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] += h * d[k];
}

// Step counts of each schedule segment; the last segment of a non-cyclic
// schedule persists and gets no count.
std::vector<std::size_t> segment_steps(const GraphSchedule& schedule, double h) {
  const auto segs = schedule.segments();
  std::vector<std::size_t> out;
  const std::size_t checked = schedule.cyclic() ? segs.size() : segs.size() - 1;
  for (std::size_t k = 0; k < checked; ++k) {
    const double ratio = segs[k].duration / h;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::fabs(rounded * h - segs[k].duration) > 1e-9 * std::max(1.0, segs[k].duration)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "segment %zu duration %.17g is not an integer multiple of h=%.17g", k,
                    segs[k].duration, h);
      throw Error(ErrorKind::ConfigError, buf);
    }
    out.push_back(static_cast<std::size_t>(rounded));
  }
  return out;
}

}  // namespace

StateMatrix gradients(const CostEnsemble& costs, const StateMatrix& x) {
  check_shapes(costs, x);
  StateMatrix psi;
  kernels::gradients_serial(costs, x, psi);
  return psi;
}

StateMatrix rhs(const ProtocolSpec& spec, const GraphSnapshot& graph, const CostEnsemble& costs, const StateMatrix& x,
                Kernel kernel, double t) {
  validate(spec);
  check_shapes(costs, x);
  check_spec_shape(spec, x);
  StateMatrix psi;
  StateMatrix out;
  evaluate_rhs(spec, graph, costs, x, kernel, t, psi, out);
  return out;
}

SimState step(const ProtocolSpec& spec, const GraphSchedule& schedule, const CostEnsemble& costs,
              const SimState& state, double h, Kernel kernel) {
  if (!(h > 0.0)) throw Error(ErrorKind::ConfigError, "step size must be > 0");
  const StateMatrix dx = rhs(spec, graph_at(schedule, state.t), costs, state.x, kernel, state.t);
  SimState next{state.t + h, state.x};
  axpy(h, dx, next.x);
  return next;
}

Trajectory run(const ProtocolSpec& spec, const GraphSchedule& schedule, const CostEnsemble& costs,
               const StateMatrix& x0, const RunOptions& opt) {
  validate(spec);
  check_shapes(costs, x0);
  check_spec_shape(spec, x0);
  if (schedule.agents() != x0.rows()) throw Error(ErrorKind::DimensionMismatch, "schedule and state disagree on n");
  if (!(opt.h > 0.0)) throw Error(ErrorKind::ConfigError, "h must be > 0");
  if (!(opt.t_end > 0.0)) throw Error(ErrorKind::ConfigError, "t_end must be > 0");
  if (opt.sample_every == 0) throw Error(ErrorKind::ConfigError, "sample_every must be >= 1");
  if (!x0.all_finite()) throw Error(ErrorKind::ConfigError, "initial state is not finite");

  const std::vector<std::size_t> seg_steps = segment_steps(schedule, opt.h);
  const auto segs = schedule.segments();
  const auto total_steps = static_cast<std::size_t>(std::ceil(opt.t_end / opt.h - 1e-9));

  Trajectory traj;
  StateMatrix x = x0;
  StateMatrix psi(x.rows(), x.cols());
  StateMatrix dx(x.rows(), x.cols());

  const auto record = [&](std::size_t k) {
    kernels::gradients_serial(costs, x, psi);
    traj.times.push_back(static_cast<double>(k) * opt.h);
    traj.states.push_back(x);
    traj.costs.push_back(costs.total(x.data()));
    traj.dispersions.push_back(dispersion(psi));
  };
  record(0);

  const double slack = lyapunov_slack(traj.costs.front());
  std::size_t rises = 0;
  std::size_t calm = 0;
  std::size_t seg = 0;
  std::size_t seg_left = seg_steps.empty() ? std::numeric_limits<std::size_t>::max() : seg_steps[0];

  std::size_t k = 0;
  while (k < total_steps) {
    const double t = static_cast<double>(k) * opt.h;
    try {
      evaluate_rhs(spec, segs[seg].snapshot, costs, x, opt.kernel, t, psi, dx);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NumericalDivergence) throw;
      traj.status = RunStatus::Diverged;
      traj.diagnostic = e.what();
      break;
    }
    axpy(opt.h, dx, x);
    ++k;

    if (--seg_left == 0) {
      if (seg + 1 < segs.size()) {
        ++seg;
      } else {
        seg = 0;  // only reachable for cyclic schedules
      }
      seg_left = seg < seg_steps.size() ? seg_steps[seg] : std::numeric_limits<std::size_t>::max();
    }

    if (k % opt.sample_every != 0 && k != total_steps) continue;
    record(k);
    const std::size_t last = traj.size() - 1;
    if (!std::isfinite(traj.costs[last])) {
      traj.status = RunStatus::Diverged;
      traj.diagnostic = "cost is not finite at t=" + std::to_string(traj.times[last]);
      break;
    }
    if (opt.lyapunov_guard) {
      rises = traj.costs[last] > traj.costs[last - 1] + slack ? rises + 1 : 0;
      if (rises >= opt.guard_patience) {
        traj.status = RunStatus::StepTooLarge;
        char buf[128];
        std::snprintf(buf, sizeof buf, "cost rose for %zu consecutive samples (slack %.3g) ending at t=%.17g",
                      rises, slack, traj.times[last]);
        traj.diagnostic = buf;
        break;
      }
    }
    if (opt.stop_tol > 0.0) {
      calm = traj.dispersions[last] < opt.stop_tol ? calm + 1 : 0;
      if (calm >= opt.stop_patience) {
        traj.status = RunStatus::EarlyStopped;
        break;
      }
    }
  }
  traj.steps = k;
  return traj;
}

}  // namespace resalloc
