#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "resalloc/config.hpp"
#include "resalloc/errors.hpp"
#include "resalloc/harness.hpp"
#include "resalloc/report.hpp"

namespace resalloc::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string scenario;
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> h;
  std::optional<double> t_end;
  std::optional<std::size_t> sample_every;
  std::optional<double> eta1;
  std::optional<double> eta2;
  std::optional<double> v1;
  std::optional<double> v2;
  std::string protocol;
  bool normalize = false;
  double window = 0.0;
};

void add_source(CLI::App* sub, Options& o) {
  auto* scen = sub->add_option("--scenario", o.scenario, "Built-in scenario (cycle-quartic, switching-quadlse)");
  auto* conf = sub->add_option("--config", o.config, "Scenario config file");
  scen->excludes(conf);
  conf->excludes(scen);
  sub->add_option("--seed", o.seed, "Override the scenario seed");
}

void add_overrides(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out_dir, "Output directory");
  sub->add_option("--h", o.h, "Step size");
  sub->add_option("--t-end", o.t_end, "Final time");
  sub->add_option("--sample-every", o.sample_every, "Sampling interval in steps");
  sub->add_option("--protocol", o.protocol, "linear | sign-power | combined | combined-vector");
  sub->add_option("--eta1", o.eta1, "Gain of the v1 term");
  sub->add_option("--eta2", o.eta2, "Gain of the v2 term");
  sub->add_option("--v1", o.v1, "Exponent v1 in (0, 1]");
  sub->add_option("--v2", o.v2, "Exponent v2 >= 1");
}

ScenarioConfig load(const Options& o) {
  if (o.scenario.empty() && o.config.empty()) throw Error(ErrorKind::ConfigError, "give --scenario or --config");
  ScenarioConfig c = o.config.empty() ? builtin_config(o.scenario) : load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.h) c.integration.h = *o.h;
  if (o.t_end) c.integration.t_end = *o.t_end;
  if (o.sample_every) c.integration.sample_every = *o.sample_every;
  if (!o.protocol.empty()) {
    const auto kind = parse_protocol_kind(o.protocol);
    if (!kind) throw Error(ErrorKind::ConfigError, "unknown protocol '" + o.protocol + "'");
    c.protocol.kind = *kind;
    if (*kind == ProtocolKind::Linear) c.protocol.v1 = c.protocol.v2 = 1.0;
    if (*kind == ProtocolKind::Linear || *kind == ProtocolKind::SignPower) c.protocol.eta2 = 0.0;
  }
  if (o.eta1) c.protocol.eta1 = *o.eta1;
  if (o.eta2) c.protocol.eta2 = *o.eta2;
  if (o.v1) c.protocol.v1 = *o.v1;
  if (o.v2) c.protocol.v2 = *o.v2;
  if (!o.out_dir.empty()) c.output_dir = o.out_dir;
  return c;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
  return f;
}

int cmd_run(const Options& o, std::ostream& out) {
  const ScenarioConfig c = load(o);
  const Scenario s = build_scenario(c);
  const OracleSolution oracle = solve_oracle(s);
  const ProtocolRun r = run_scenario(s, oracle);
  if (!r.error.empty()) throw Error(ErrorKind::ConfigError, r.error);

  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  {
    std::ofstream csv = open_out(dir / "trajectory.csv");
    write_csv(csv, r.metrics);
  }
  std::ostringstream summary;
  write_run_summary(summary, s, r, oracle);
  open_out(dir / "summary.txt") << summary.str();
  out << summary.str();
  out << "wrote " << (dir / "trajectory.csv").string() << " and " << (dir / "summary.txt").string() << '\n';
  return r.trajectory.ok() ? kOk : kDiverged;
}

int cmd_compare(const Options& o, std::ostream& out) {
  const ScenarioConfig c = load(o);
  const Scenario s = build_scenario(c);
  const std::vector<ProtocolSpec> specs = default_comparison(s.spec);
  const ComparisonReport report = compare(s, specs, o.normalize);

  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  const std::vector<std::string> names = csv_names(report.runs);
  for (std::size_t q = 0; q < report.runs.size(); ++q) {
    std::ofstream csv = open_out(dir / names[q]);
    write_csv(csv, report.runs[q].metrics);
  }
  std::ostringstream summary;
  write_comparison_summary(summary, s, report);
  open_out(dir / "comparison.txt") << summary.str();
  out << summary.str();
  bool all_ok = true;
  for (const ProtocolRun& r : report.runs) all_ok = all_ok && r.ok();
  return all_ok ? kOk : kDiverged;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const Scenario s = build_scenario(load(o));
  out << "scenario: " << s.name << "  seed: " << s.seed << "  n: " << s.agents() << '\n';
  write_oracle(out, solve_oracle(s));
  return kOk;
}

int cmd_check_graph(const Options& o, std::ostream& out) {
  const Scenario s = build_scenario(load(o));
  const GraphSchedule& g = s.schedule;
  const double window = o.window > 0.0 ? o.window : g.period();
  double start = 0.0;
  std::vector<GraphSnapshot> snaps;
  for (std::size_t k = 0; k < g.segments().size(); ++k) {
    const Segment& seg = g.segments()[k];
    const bool connected = has_spanning_tree(seg.snapshot);
    out << "snapshot " << k << " [" << format_double(start) << ", " << format_double(start + seg.duration)
        << "): " << (connected ? "connected" : "disconnected") << ", " << seg.snapshot.edge_count() << " edges, "
        << component_count(seg.snapshot) << " components\n";
    start += seg.duration;
    snaps.push_back(seg.snapshot);
  }
  const bool union_ok = has_spanning_tree(union_of(snaps));
  const bool joint = check_assumption_tree(g, window);
  out << "union: " << (union_ok ? "connected" : "disconnected") << "; joint connectivity (window "
      << format_double(window) << "): " << (joint ? "satisfied" : "violated") << '\n';
  return kOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed resource allocation simulator"};
  app.name("resalloc");
  app.require_subcommand(1);
  // "-h" would collide with the step size option.
  app.set_help_flag("--help", "Print this help message and exit");
  Options o;

  auto* run = app.add_subcommand("run", "Simulate one scenario; writes trajectory.csv and summary.txt");
  add_source(run, o);
  add_overrides(run, o);
  auto* cmp = app.add_subcommand("compare", "Run linear, sign-power and the scenario protocol on identical inputs");
  add_source(cmp, o);
  add_overrides(cmp, o);
  cmp->add_flag("--normalize", o.normalize, "Divide weights by the maximum row sum first");
  auto* orc = app.add_subcommand("oracle", "Print the constrained optimum of a scenario");
  add_source(orc, o);
  auto* chk = app.add_subcommand("check-graph", "Per-snapshot connectivity and the joint connectivity verdict");
  add_source(chk, o);
  chk->add_option("--window", o.window, "Window length (default: one period)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(o, out);
    if (cmp->parsed()) return cmd_compare(o, out);
    if (orc->parsed()) return cmd_oracle(o, out);
    if (chk->parsed()) return cmd_check_graph(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const bool numeric = e.kind() == ErrorKind::NumericalDivergence || e.kind() == ErrorKind::StepTooLarge;
    return numeric ? kDiverged : kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace resalloc::cli
