#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "resalloc/cost.hpp"
#include "resalloc/dynamics.hpp"
#include "resalloc/graph.hpp"

namespace resalloc {

enum class GraphKind { Explicit, Cycle, ScaleFree };
enum class InitPolicy { Uniform, Random, Explicit };

struct ExplicitSegment {
  double duration = 1.0;
  std::vector<Edge> edges;

  bool operator==(const ExplicitSegment&) const = default;
};

struct GraphConfig {
  GraphKind kind = GraphKind::Cycle;
  bool cyclic = true;
  bool normalize = false;
  double weight_lo = 0.0;
  double weight_hi = 1.0;
  std::vector<ExplicitSegment> segments;
  // scale-free base graph thinned into a cyclic schedule
  std::size_t attach = 2;
  std::size_t snapshots = 4;
  double segment_length = 25.0;
  double keep_probability = 0.5;
  bool require_disconnected = true;

  bool operator==(const GraphConfig&) const = default;
};

struct CostConfig {
  CostFamily family = CostFamily::Quartic;
  bool explicit_params = false;
  CostRanges ranges = CostRanges::defaults(CostFamily::Quartic);
  std::vector<CostFunction> costs;  // agent-major, n * dim entries when explicit

  bool operator==(const CostConfig&) const = default;
};

struct IntegrationConfig {
  double h = 1e-3;
  double t_end = 1.0;
  std::size_t sample_every = 1;
  double stop_tol = 0.0;
  std::size_t stop_patience = 3;
  InitPolicy init = InitPolicy::Uniform;
  double init_lo = -1.0;
  double init_hi = 1.0;
  std::vector<double> x0;  // agent-major, n * dim entries when explicit
  Kernel kernel = Kernel::Serial;

  bool operator==(const IntegrationConfig&) const = default;
};

/// Everything needed to materialize a Scenario. Text form: sections
/// [scenario] [graph] [costs] [protocol] [integration] [output] holding
/// `key = value` lines; `#` starts a comment. The README lists every key.
struct ScenarioConfig {
  std::string name = "custom";
  std::optional<std::uint64_t> seed;
  std::size_t n = 0;
  std::size_t dim = 1;
  std::vector<double> K{0.0};
  GraphConfig graph;
  CostConfig costs;
  ProtocolSpec protocol;
  IntegrationConfig integration;
  std::string output_dir = "out";

  bool operator==(const ScenarioConfig&) const = default;
};

/// Throws Error{ConfigError} with "<source>:<line>: ..." diagnostics.
ScenarioConfig parse_config(std::string_view text, std::string_view source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

std::optional<ProtocolKind> parse_protocol_kind(std::string_view word);
std::optional<CostFamily> parse_cost_family(std::string_view word);

}  // namespace resalloc
