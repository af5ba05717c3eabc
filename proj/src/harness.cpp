#include "resalloc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>

#include "resalloc/errors.hpp"

namespace resalloc {

namespace {

std::string fmt(const char* pattern, double a, double b) {
  char buf[200];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

GraphSchedule build_graph(const ScenarioConfig& c, Rng& weights, Rng& deletions, std::vector<std::string>& notes) {
  const GraphConfig& g = c.graph;
  switch (g.kind) {
    case GraphKind::Cycle:
      if (c.n < 2) throw Error(ErrorKind::ConfigError, "cycle graph needs n >= 2");
      return GraphSchedule::constant(cycle_graph(c.n, weights, g.weight_lo, g.weight_hi));
    case GraphKind::ScaleFree: {
      std::vector<Edge> base = scale_free_edges(c.n, g.attach, weights);
      for (Edge& e : base) e.weight = weights.uniform(g.weight_lo, g.weight_hi);
      if (g.snapshots <= 1 && !g.require_disconnected) {
        return GraphSchedule::constant(GraphSnapshot::from_edges(c.n, base));
      }
      ThinningOptions opts;
      opts.snapshots = g.snapshots;
      opts.keep_probability = g.keep_probability;
      opts.segment_length = g.segment_length;
      opts.require_disconnected = g.require_disconnected;
      return thinned_schedule(c.n, base, opts, deletions);
    }
    case GraphKind::Explicit: {
      std::vector<Segment> segs;
      for (const ExplicitSegment& s : g.segments) {
        for (const Edge& e : s.edges) {
          if (e.i >= c.n || e.j >= c.n) throw Error(ErrorKind::ConfigError, "edge endpoint out of range");
        }
        if (!(s.duration > 0.0)) throw Error(ErrorKind::ConfigError, "segment durations must be > 0");
        segs.push_back({s.duration, GraphSnapshot::from_edges(c.n, s.edges)});
      }
      if (segs.empty()) throw Error(ErrorKind::ConfigError, "explicit graph has no segments");
      if (segs.size() == 1 && g.cyclic) notes.emplace_back("single explicit segment: schedule is static");
      return GraphSchedule(std::move(segs), g.cyclic);
    }
  }
  throw Error(ErrorKind::ConfigError, "unknown graph kind");
}

// Switch times must land on the step grid.
GraphSchedule align_to_steps(const GraphSchedule& schedule, double h, std::vector<std::string>& notes) {
  if (schedule.segments().size() <= 1) return schedule;
  std::vector<Segment> segs;
  bool changed = false;
  for (const Segment& s : schedule.segments()) {
    const double steps = std::max(1.0, std::round(s.duration / h));
    const double d = steps * h;
    const bool off_grid = std::fabs(d - s.duration) > 1e-9 * std::max(1.0, s.duration);
    if (off_grid) notes.push_back(fmt("segment duration %.17g rounded to %.17g (a multiple of h)", s.duration, d));
    changed = changed || off_grid;
    segs.push_back({off_grid ? d : s.duration, s.snapshot});
  }
  return changed ? GraphSchedule(std::move(segs), schedule.cyclic()) : schedule;
}

StateMatrix initial_state(const ScenarioConfig& c, Rng& rng) {
  const IntegrationConfig& in = c.integration;
  const auto n = static_cast<double>(c.n);
  StateMatrix x(c.n, c.dim);
  switch (in.init) {
    case InitPolicy::Uniform:
      for (std::size_t i = 0; i < c.n; ++i) {
        for (std::size_t k = 0; k < c.dim; ++k) x(i, k) = c.K[k] / n;
      }
      return x;
    case InitPolicy::Random:
      if (in.init_hi < in.init_lo) throw Error(ErrorKind::ConfigError, "init_high < init_low");
      for (double& v : x.data()) v = rng.uniform(in.init_lo, in.init_hi);
      for (std::size_t k = 0; k < c.dim; ++k) {
        const double offset = (x.column_sum(k) - c.K[k]) / n;
        for (std::size_t i = 0; i < c.n; ++i) x(i, k) -= offset;
      }
      return x;
    case InitPolicy::Explicit: {
      if (in.x0.size() != c.n * c.dim) throw Error(ErrorKind::ConfigError, "x0 needs n * dim values");
      x = StateMatrix(c.n, c.dim, in.x0);
      for (std::size_t k = 0; k < c.dim; ++k) {
        const double offset = x.column_sum(k) - c.K[k];
        if (std::fabs(offset) > 1e-9 * std::max(1.0, std::fabs(c.K[k]))) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "coordinate %zu: sum(x0) - K = %.17g", k, offset);
          throw Error(ErrorKind::InfeasibleInitial, buf);
        }
      }
      return x;
    }
  }
  return x;
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& c) {
  if (!c.seed) throw Error(ErrorKind::ConfigError, "scenario seed is required");
  if (c.n == 0) throw Error(ErrorKind::ConfigError, "n must be >= 1");
  if (c.dim == 0) throw Error(ErrorKind::ConfigError, "dim must be >= 1");
  if (c.K.size() != c.dim) throw Error(ErrorKind::ConfigError, "K needs one value per coordinate");
  if (!(c.integration.h > 0.0) || !(c.integration.t_end > 0.0)) {
    throw Error(ErrorKind::ConfigError, "h and t_end must be > 0");
  }
  if (c.integration.sample_every == 0) throw Error(ErrorKind::ConfigError, "sample_every must be >= 1");

  Scenario s;
  s.name = c.name;
  s.seed = *c.seed;
  s.K = c.K;
  s.spec = c.protocol;
  s.spec.dim = c.dim;
  validate_strict(s.spec);

  Rng weights(s.seed, Stream::Weights);
  Rng cost_rng(s.seed, Stream::Costs);
  Rng initials(s.seed, Stream::Initials);
  Rng deletions(s.seed, Stream::Deletions);

  // Topology and weights come first, deletions last, whatever the order of
  // the calls below: every stream is independent.
  GraphSchedule schedule = build_graph(c, weights, deletions, s.notes);

  if (c.costs.explicit_params) {
    if (c.costs.costs.size() != c.n * c.dim) throw Error(ErrorKind::ConfigError, "explicit costs need n * dim entries");
    for (const CostFunction& f : c.costs.costs) check_strictly_convex(f);
    s.costs = CostEnsemble(c.costs.costs, c.dim);
  } else {
    s.costs = random_ensemble(c.costs.family, c.n, c.dim, c.costs.ranges, cost_rng);
  }

  s.x0 = initial_state(c, initials);

  schedule = align_to_steps(schedule, c.integration.h, s.notes);
  if (c.graph.normalize) schedule = schedule.normalized();
  s.schedule = std::move(schedule);

  RunOptions& o = s.options;
  o.h = c.integration.h;
  o.t_end = c.integration.t_end;
  o.sample_every = c.integration.sample_every;
  o.stop_tol = c.integration.stop_tol;
  o.stop_patience = c.integration.stop_patience;
  o.kernel = c.integration.kernel;
  return s;
}

double OracleSolution::residual() const {
  double r = 0.0;
  for (const KktSolution& c : coords) r = std::max(r, c.residual);
  return r;
}

OracleSolution solve_oracle(const CostEnsemble& costs, std::span<const double> K) {
  OracleSolution out;
  out.coords = solve_kkt_separable(costs, K);
  for (const KktSolution& c : out.coords) out.f_star += c.f_star;
  return out;
}

MetricSample measure(const StateMatrix& x, const CostEnsemble& costs, std::span<const double> K,
                     const OracleSolution& oracle, double t) {
  if (K.size() != x.cols()) throw Error(ErrorKind::DimensionMismatch, "K and state disagree on dim");
  MetricSample m;
  m.t = t;
  m.cost = costs.total(x.data());
  m.raw_suboptimality = m.cost - oracle.f_star;
  m.suboptimality = std::max(m.raw_suboptimality, -1e-8);
  m.dispersion = dispersion(gradients(costs, x));
  for (std::size_t k = 0; k < x.cols(); ++k) {
    m.feasibility_drift = std::max(m.feasibility_drift, std::fabs(x.column_sum(k) - K[k]));
  }
  return m;
}

std::vector<MetricSample> measure_all(const Trajectory& traj, std::span<const double> K,
                                      const OracleSolution& oracle) {
  std::vector<MetricSample> out;
  out.reserve(traj.size());
  for (std::size_t s = 0; s < traj.size(); ++s) {
    MetricSample m;
    m.t = traj.times[s];
    m.cost = traj.costs[s];
    m.raw_suboptimality = m.cost - oracle.f_star;
    m.suboptimality = std::max(m.raw_suboptimality, -1e-8);
    m.dispersion = traj.dispersions[s];
    for (std::size_t k = 0; k < traj.states[s].cols(); ++k) {
      m.feasibility_drift = std::max(m.feasibility_drift, std::fabs(traj.states[s].column_sum(k) - K[k]));
    }
    out.push_back(m);
  }
  return out;
}

std::optional<double> time_to_eps(std::span<const MetricSample> samples, double f_star, double eps) {
  const double threshold = eps * std::max(1.0, std::fabs(f_star));
  for (const MetricSample& m : samples) {
    if (m.suboptimality <= threshold) return m.t;
  }
  return std::nullopt;
}

namespace {

ProtocolRun run_one(const ProtocolSpec& spec, const GraphSchedule& schedule, const Scenario& s,
                    const OracleSolution& oracle) {
  ProtocolRun r;
  r.spec = spec;
  try {
    r.trajectory = run(spec, schedule, s.costs, s.x0, s.options);
  } catch (const std::exception& e) {
    r.error = e.what();
    return r;
  }
  r.metrics = measure_all(r.trajectory, s.K, oracle);
  for (std::size_t q = 0; q < kEpsilons.size(); ++q) r.time_to[q] = time_to_eps(r.metrics, oracle.f_star, kEpsilons[q]);
  return r;
}

}  // namespace

ProtocolRun run_scenario(const Scenario& scenario, const OracleSolution& oracle) {
  return run_one(scenario.spec, scenario.schedule, scenario, oracle);
}

ComparisonReport compare(const Scenario& scenario, std::span<const ProtocolSpec> specs, bool normalize) {
  if (specs.empty()) throw Error(ErrorKind::ConfigError, "compare needs at least one protocol");
  ComparisonReport report;
  report.scenario = scenario.name;
  report.seed = scenario.seed;
  report.agents = scenario.agents();
  report.h = scenario.options.h;
  report.sample_interval = static_cast<double>(scenario.options.sample_every) * scenario.options.h;
  report.normalized = normalize;
  report.oracle = solve_oracle(scenario);

  const GraphSchedule schedule = normalize ? scenario.schedule.normalized() : scenario.schedule;
  report.runs.resize(specs.size());
  const auto count = static_cast<long>(specs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long q = 0; q < count; ++q) {
    report.runs[static_cast<std::size_t>(q)] =
        run_one(specs[static_cast<std::size_t>(q)], schedule, scenario, report.oracle);
  }
  return report;
}

std::vector<ProtocolSpec> default_comparison(const ProtocolSpec& reference) {
  return {ProtocolSpec::linear(reference.eta1), ProtocolSpec::sign_power(reference.eta1, reference.v1), reference};
}

}  // namespace resalloc
