#include "resalloc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace resalloc {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, std::span<const MetricSample> samples) {
  out << kCsvHeader << '\n';
  for (const MetricSample& m : samples) {
    out << format_double(m.t) << ',' << format_double(m.cost) << ',' << format_double(m.suboptimality) << ','
        << format_double(m.dispersion) << ',' << format_double(m.feasibility_drift) << '\n';
  }
}

void write_oracle(std::ostream& out, const OracleSolution& oracle, bool with_allocation) {
  out << "F* = " << format_double(oracle.f_star) << '\n';
  for (std::size_t k = 0; k < oracle.coords.size(); ++k) {
    const KktSolution& c = oracle.coords[k];
    const std::string tag = oracle.coords.size() > 1 ? "[" + std::to_string(k) + "]" : "";
    out << "psi*" << tag << " = " << format_double(c.psi_star) << '\n';
    out << "residual" << tag << " = " << format_double(c.residual) << '\n';
    if (with_allocation) {
      out << "x*" << tag << " =";
      for (double x : c.x_star) out << ' ' << format_double(x);
      out << '\n';
    }
  }
}

namespace {

void fingerprint(std::ostream& out, const Scenario& s) {
  out << "scenario: " << s.name << '\n';
  out << "seed: " << s.seed << '\n';
  out << "n: " << s.agents() << "  dim: " << s.dim() << '\n';
  out << "K:";
  for (double k : s.K) out << ' ' << format_double(k);
  out << '\n';
  out << "snapshots: " << s.schedule.segments().size() << (s.schedule.cyclic() ? " (cyclic)" : "") << '\n';
  out << "h: " << format_double(s.options.h) << "  t_end: " << format_double(s.options.t_end)
      << "  sample interval: " << format_double(static_cast<double>(s.options.sample_every) * s.options.h) << '\n';
  for (const std::string& note : s.notes) out << "note: " << note << '\n';
}

std::string time_cell(const std::optional<double>& t) { return t ? format_double(*t) : "not reached"; }

void final_metrics(std::ostream& out, const ProtocolRun& r) {
  out << "status: " << (r.error.empty() ? std::string(status_name(r.trajectory.status)) : "error") << '\n';
  if (!r.error.empty()) out << "error: " << r.error << '\n';
  if (!r.trajectory.diagnostic.empty()) out << "diagnostic: " << r.trajectory.diagnostic << '\n';
  if (r.metrics.empty()) return;
  const MetricSample& m = r.metrics.back();
  out << "final t: " << format_double(m.t) << '\n';
  out << "final cost: " << format_double(m.cost) << '\n';
  out << "final suboptimality: " << format_double(m.suboptimality) << " (raw " << format_double(m.raw_suboptimality)
      << ")\n";
  out << "final dispersion: " << format_double(m.dispersion) << '\n';
  double drift = 0.0;
  for (const MetricSample& s : r.metrics) drift = std::max(drift, s.feasibility_drift);
  out << "max feasibility drift: " << format_double(drift) << '\n';
}

}  // namespace

void write_run_summary(std::ostream& out, const Scenario& scenario, const ProtocolRun& run,
                       const OracleSolution& oracle) {
  fingerprint(out, scenario);
  out << "protocol: " << run.spec.label() << '\n';
  write_oracle(out, oracle, false);
  final_metrics(out, run);
  out << "time to eps (suboptimality <= eps * max(1, |F*|), sampled):\n";
  for (std::size_t q = 0; q < kEpsilons.size(); ++q) {
    char eps[16];
    std::snprintf(eps, sizeof eps, "%g", kEpsilons[q]);
    out << "  " << eps << ": " << time_cell(run.time_to[q]) << '\n';
  }
}

void write_comparison_summary(std::ostream& out, const Scenario& scenario, const ComparisonReport& report) {
  fingerprint(out, scenario);
  if (report.normalized) out << "weights: normalized by the maximum row sum\n";
  write_oracle(out, report.oracle, false);
  out << "\nprotocol";
  for (double e : kEpsilons) {
    char eps[24];
    std::snprintf(eps, sizeof eps, ",t(%g)", e);
    out << eps;
  }
  out << ",final_suboptimality,final_dispersion,status\n";
  for (const ProtocolRun& r : report.runs) {
    out << r.spec.label();
    for (const auto& t : r.time_to) out << ',' << time_cell(t);
    if (r.metrics.empty()) {
      out << ",,";
    } else {
      out << ',' << format_double(r.metrics.back().suboptimality) << ',' << format_double(r.metrics.back().dispersion);
    }
    out << ',' << (r.error.empty() ? std::string(status_name(r.trajectory.status)) : "error: " + r.error) << '\n';
  }
}

std::vector<std::string> csv_names(std::span<const ProtocolRun> runs) {
  std::map<std::string, int> seen;
  std::vector<std::string> out;
  for (const ProtocolRun& r : runs) {
    const std::string base(kind_name(r.spec.kind));
    const int k = seen[base]++;
    out.push_back(k == 0 ? base + ".csv" : base + "-" + std::to_string(k) + ".csv");
  }
  return out;
}

}  // namespace resalloc
