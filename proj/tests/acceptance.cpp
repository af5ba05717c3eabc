// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "resalloc/dynamics.hpp"
#include "resalloc/harness.hpp"
#include "resalloc/oracle.hpp"

namespace {

using namespace resalloc;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : "not reached"; }

double max_drift(const ProtocolRun& r) {
  double d = 0.0;
  for (const MetricSample& m : r.metrics) d = std::max(d, m.feasibility_drift);
  return d;
}

// Largest rise of the cost column beyond the slack, as a signed margin:
// <= 0 means every consecutive pair is within tolerance.
double worst_rise(const ProtocolRun& r) {
  const double slack = lyapunov_slack(r.metrics.front().cost);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < r.metrics.size(); ++k) {
    worst = std::max(worst, r.metrics[k].cost - r.metrics[k - 1].cost - slack);
  }
  return worst;
}

double ordered(const std::optional<double>& t) { return t ? *t : std::numeric_limits<double>::infinity(); }

// Shared reference runs.
struct References {
  Scenario cycle;
  Scenario switching;
  ComparisonReport cycle_compare;  // linear, sign-power, combined
  OracleSolution switching_oracle;
  ProtocolRun switching_run;

  const ProtocolRun& cycle_combined() const { return cycle_compare.runs[2]; }
};

References run_references() {
  References r;
  r.cycle = reference_scenario_cycle();
  const std::vector<ProtocolSpec> specs = default_comparison(r.cycle.spec);
  r.cycle_compare = compare(r.cycle, specs);
  r.switching = reference_scenario_switching();
  r.switching_oracle = solve_oracle(r.switching);
  r.switching_run = run_scenario(r.switching, r.switching_oracle);
  return r;
}

Verdict feasibility(const References& ref) {
  const double a = max_drift(ref.cycle_combined());
  const double b = max_drift(ref.switching_run);
  const bool ran = ref.cycle_combined().ok() && ref.switching_run.ok();
  return {ran && a <= 1e-8 && b <= 1e-8, "max |sum x - K|: cycle " + num(a) + ", switching " + num(b)};
}

Verdict lyapunov(const References& ref) {
  const double a = worst_rise(ref.cycle_combined());
  const double b = worst_rise(ref.switching_run);
  return {a <= 0.0 && b <= 0.0,
          "worst rise minus slack: cycle " + num(a) + ", switching " + num(b) + " (<= 0 required)"};
}

Verdict oracle() {
  Verdict v;
  std::ostringstream detail;
  const double grid = 1e-3;
  struct Case {
    CostFamily family;
    double K;
  };
  const Case cases[] = {{CostFamily::Quartic, 0.0}, {CostFamily::QuadLse, 4.0}, {CostFamily::Quadratic, 1.0}};
  double worst_gap = 0.0;
  double worst_consensus = 0.0;
  for (const Case& c : cases) {
    for (std::size_t n : {2u, 3u}) {
      Rng rng(1000 + n, Stream::Costs);
      const CostEnsemble costs = random_ensemble(c.family, n, 1, CostRanges::defaults(c.family), rng);
      const KktSolution s = solve_kkt(costs, c.K);
      const GridMinimum g = brute_force_check(costs, c.K, grid);
      const double gap = std::fabs(g.f - s.f_star);
      double consensus = 0.0;
      for (std::size_t i = 0; i < n; ++i) consensus = std::max(consensus, std::fabs(grad(costs.at(i), s.x_star[i]) - s.psi_star));
      worst_gap = std::max(worst_gap, gap);
      worst_consensus = std::max(worst_consensus, consensus);
      if (gap > 1e-4 || consensus > 1e-8) {
        v.pass = false;
        detail << " [" << family_name(c.family) << " n=" << n << " gap " << num(gap) << "]";
      }
    }
  }
  v.detail = "6 ensembles, worst |F* - F_grid| " + num(worst_gap) + ", worst consensus " + num(worst_consensus) +
             detail.str();
  return v;
}

Verdict cycle_convergence(const References& ref) {
  const ProtocolRun& r = ref.cycle_combined();
  const double f_star = ref.cycle_compare.oracle.f_star;
  const auto t = time_to_eps(r.metrics, f_star, 1e-3);
  const double disp = r.metrics.back().dispersion;
  const bool before_end = t && *t < r.metrics.back().t;
  return {r.ok() && before_end && disp <= 1e-3,
          "F* " + num(f_star) + ", t(1e-3) " + num(t) + " of t_end " + num(r.metrics.back().t) + ", final dispersion " +
              num(disp)};
}

Verdict switching_convergence(const References& ref) {
  const ProtocolRun& r = ref.switching_run;
  const double f_star = ref.switching_oracle.f_star;
  const double rel = r.metrics.back().suboptimality / std::max(1.0, std::fabs(f_star));

  // Connectivity as reported by the command line front end.
  const char* argv[] = {"resalloc", "check-graph", "--scenario", "switching-quadlse", "--window", "100"};
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::cli_main(6, argv, out, err);
  const std::string text = out.str();
  std::size_t snapshots = 0;
  std::size_t disconnected = 0;
  for (std::size_t p = text.find("snapshot "); p != std::string::npos; p = text.find("snapshot ", p + 1)) {
    ++snapshots;
    if (text.compare(text.find("): ", p) + 3, 12, "disconnected") == 0) ++disconnected;
  }
  const bool union_ok = text.find("union: connected") != std::string::npos;
  const bool joint = text.find("): satisfied") != std::string::npos;
  bool direct = true;
  for (const Segment& s : ref.switching.schedule.segments()) direct = direct && !has_spanning_tree(s.snapshot);

  return {r.ok() && rel <= 1e-2 && code == 0 && snapshots == 4 && disconnected == 4 && union_ok && joint && direct,
          "final relative suboptimality " + num(rel) + ", t(1e-2) " + num(r.time_to[1]) + "; check-graph: " +
              std::to_string(disconnected) + "/" + std::to_string(snapshots) + " snapshots disconnected, union " +
              (union_ok ? "connected" : "DISCONNECTED") + ", window 100 " + (joint ? "satisfied" : "violated")};
}

// Recorded from the first run of the reference cycle comparison.
constexpr double kRecordedLinear = 36.53;
constexpr double kRecordedCombined = 5.05;

Verdict speed_ordering(const References& ref) {
  const auto& runs = ref.cycle_compare.runs;
  const auto lin = runs[0].time_to[1];
  const auto sp = runs[1].time_to[1];
  const auto comb = runs[2].time_to[1];
  const bool order = comb && ordered(comb) <= ordered(lin) && ordered(comb) <= ordered(sp);
  const bool regression = lin && std::fabs(*lin - kRecordedLinear) < 1e-9 && comb &&
                          std::fabs(*comb - kRecordedCombined) < 1e-9 && !sp;
  bool all_ran = true;
  for (const ProtocolRun& r : runs) all_ran = all_ran && r.ok();
  return {all_ran && order && regression, "t(1e-2): combined " + num(comb) + ", linear " + num(lin) +
                                              ", sign-power " + num(sp) +
                                              (regression ? " (matches recorded values)" : " (REGRESSION)")};
}

Verdict reductions(const References& ref) {
  // Trajectory identity on the switching network, covering several switches.
  Scenario s = ref.switching;
  s.options.t_end = 60.0;
  s.options.sample_every = 40;
  const ProtocolSpec lin = ProtocolSpec::linear(0.8);
  const ProtocolSpec comb = ProtocolSpec::combined(0.8, 0.0, 1.0, 2.0);
  const Trajectory a = run(lin, s.schedule, s.costs, s.x0, s.options);
  const Trajectory b = run(comb, s.schedule, s.costs, s.x0, s.options);
  double traj_gap = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
    for (std::size_t i = 0; i < s.agents(); ++i) traj_gap = std::max(traj_gap, std::fabs(a.states[k](i, 0) - b.states[k](i, 0)));
  }

  Rng rng(7);
  bool odd = true;
  double identity_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(20);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (rng.canonical() < 0.5) edges.push_back({i, j, rng.uniform(0.0, 1.0)});
      }
    }
    const GraphSnapshot g = GraphSnapshot::from_edges(n, edges);
    std::vector<double> psi(n);
    for (double& p : psi) p = rng.uniform(-10.0, 10.0);
    for (double v : {0.3, 1.0, 1.6}) {
      double lhs = 0.0;
      double rhs = 0.0;
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double d = psi[j] - psi[i];
          const double gd = sgn_pow(d, v);
          odd = odd && sgn_pow(-d, v) == -gd;
          inner += g.weight(i, j) * gd;
          rhs -= 0.5 * g.weight(i, j) * d * gd;
          scale += std::fabs(g.weight(i, j) * d * gd);
        }
        lhs += psi[i] * inner;
      }
      identity_gap = std::max(identity_gap, std::fabs(lhs - rhs) / std::max(1.0, scale));
    }
  }
  return {a.ok() && b.ok() && traj_gap <= 1e-12 && odd && identity_gap <= 1e-10,
          "trajectory gap " + num(traj_gap) + " over " + std::to_string(a.size()) + " samples; oddness " +
              (odd ? "exact" : "BROKEN") + "; summation identity relative gap " + num(identity_gap) +
              " over 100 trials x 3 exponents"};
}

struct VectorCase {
  CostEnsemble costs;
  GraphSchedule schedule;
  StateMatrix x0;
  RunOptions options;
};

VectorCase vector_case() {
  ScenarioConfig c;
  c.name = "vector";
  c.seed = 31;
  c.n = 30;
  c.dim = 2;
  c.K = {1.0, -2.0};
  c.graph.kind = GraphKind::ScaleFree;
  c.graph.snapshots = 1;
  c.graph.require_disconnected = false;
  c.costs.family = CostFamily::QuadLse;
  c.costs.ranges = CostRanges::defaults(CostFamily::QuadLse);
  c.protocol = ProtocolSpec::combined_vector(0.5, 0.5, 0.5, 1.5, 2);
  c.integration.h = 1e-3;
  c.integration.t_end = 10.0;
  c.integration.sample_every = 100;
  c.integration.init = InitPolicy::Random;
  c.integration.init_lo = -5.0;
  c.integration.init_hi = 5.0;
  const Scenario s = build_scenario(c);
  return {s.costs, s.schedule, s.x0, s.options};
}

// Largest gap between a d=2 run and two scalar runs of its coordinates.
double separable_gap(const VectorCase& vc, double v1, double v2, bool& ok) {
  const Trajectory joint = run(ProtocolSpec::combined_vector(0.5, 0.5, v1, v2, 2), vc.schedule, vc.costs, vc.x0, vc.options);
  ok = joint.ok();
  double gap = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    StateMatrix x0(vc.x0.rows(), 1);
    for (std::size_t i = 0; i < x0.rows(); ++i) x0(i, 0) = vc.x0(i, k);
    const Trajectory scalar = run(ProtocolSpec::combined(0.5, 0.5, v1, v2), vc.schedule, vc.costs.coordinate(k), x0, vc.options);
    ok = ok && scalar.ok() && scalar.size() == joint.size();
    for (std::size_t s = 0; s < std::min(scalar.size(), joint.size()); ++s) {
      for (std::size_t i = 0; i < x0.rows(); ++i) gap = std::max(gap, std::fabs(joint.states[s](i, k) - scalar.states[s](i, 0)));
    }
  }
  return gap;
}

Verdict vector_extension() {
  const VectorCase vc = vector_case();
  bool ok_linear = false;
  bool ok_power = false;
  const double exact = separable_gap(vc, 1.0, 1.0, ok_linear);
  const double coupled = separable_gap(vc, 0.5, 1.5, ok_power);
  return {ok_linear && exact <= 1e-9,
          "v1=v2=1 gap " + num(exact) + " (<= 1e-9 required); v1=0.5, v2=1.5 gap " + num(coupled) +
              " (norm coupling, not expected to vanish)"};
}

}  // namespace

int main() {
  std::printf("running reference scenarios...\n");
  std::fflush(stdout);
  const References ref = run_references();

  struct Item {
    const char* name;
    std::function<Verdict()> check;
  };
  const Item items[] = {
      {"1 feasibility conservation", [&] { return feasibility(ref); }},
      {"2 cost decrease", [&] { return lyapunov(ref); }},
      {"3 oracle vs brute force", [] { return oracle(); }},
      {"4 convergence on static ring", [&] { return cycle_convergence(ref); }},
      {"5 convergence on switching graphs", [&] { return switching_convergence(ref); }},
      {"6 speed ordering", [&] { return speed_ordering(ref); }},
      {"7 identity reductions", [&] { return reductions(ref); }},
      {"8 vector extension", [] { return vector_extension(); }},
  };
  int failures = 0;
  for (const Item& item : items) {
    Verdict v;
    try {
      v = item.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::printf("criterion %s: %s  %s\n", item.name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
