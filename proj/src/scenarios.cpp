#include <string>
#include <vector>

#include "resalloc/errors.hpp"
#include "resalloc/harness.hpp"

namespace resalloc {

namespace {

// n = 10 ring with quartic costs, K = 0. All protocols share the gain 0.01;
// larger gains make Euler at h = 1e-5 blow up on the quartic gradients.
ScenarioConfig cycle_quartic() {
  ScenarioConfig c;
  c.name = "cycle-quartic";
  c.seed = 20240611;
  c.n = 10;
  c.K = {0.0};
  c.graph.kind = GraphKind::Cycle;
  c.graph.weight_lo = 0.0;
  c.graph.weight_hi = 1.0;
  c.graph.normalize = true;
  c.costs.family = CostFamily::Quartic;
  c.costs.ranges = CostRanges::defaults(CostFamily::Quartic);
  c.protocol = ProtocolSpec::combined(0.01, 0.01, 0.1, 1.6);
  c.integration.h = 1e-5;
  c.integration.t_end = 80.0;
  c.integration.sample_every = 1000;
  c.integration.init = InitPolicy::Random;
  c.integration.init_lo = -6.0;
  c.integration.init_hi = 6.0;
  c.output_dir = "out/cycle-quartic";
  return c;
}

// n = 100 agents, four 25-unit snapshots thinned from a scale-free graph.
// No snapshot is connected; their union is.
ScenarioConfig switching_quadlse() {
  ScenarioConfig c;
  c.name = "switching-quadlse";
  c.seed = 20240612;
  c.n = 100;
  c.K = {4.0};
  c.graph.kind = GraphKind::ScaleFree;
  c.graph.attach = 2;
  c.graph.weight_lo = 0.0;
  c.graph.weight_hi = 1.0;
  c.graph.snapshots = 4;
  c.graph.segment_length = 25.0;
  c.graph.keep_probability = 0.5;
  c.graph.require_disconnected = true;
  c.costs.family = CostFamily::QuadLse;
  c.costs.ranges = CostRanges::defaults(CostFamily::QuadLse);
  c.protocol = ProtocolSpec::combined(1.0, 1.0, 0.2, 2.0);
  c.integration.h = 0.0025;
  c.integration.t_end = 200.0;
  c.integration.sample_every = 400;
  c.integration.init = InitPolicy::Random;
  c.integration.init_lo = -5.0;
  c.integration.init_hi = 5.0;
  c.integration.kernel = Kernel::Parallel;
  c.output_dir = "out/switching-quadlse";
  return c;
}

}  // namespace

std::vector<std::string> builtin_names() { return {"cycle-quartic", "switching-quadlse"}; }

ScenarioConfig builtin_config(std::string_view name) {
  if (name == "cycle-quartic") return cycle_quartic();
  if (name == "switching-quadlse") return switching_quadlse();
  throw Error(ErrorKind::ConfigError, "unknown scenario '" + std::string(name) +
                                          "' (built-ins: cycle-quartic, switching-quadlse)");
}

Scenario reference_scenario_cycle() { return build_scenario(cycle_quartic()); }
Scenario reference_scenario_switching() { return build_scenario(switching_quadlse()); }

}  // namespace resalloc
