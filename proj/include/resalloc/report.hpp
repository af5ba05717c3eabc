#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "resalloc/harness.hpp"

namespace resalloc {

/// Column order of every trajectory CSV.
inline constexpr const char* kCsvHeader = "t,cost,suboptimality,dispersion,feasibility_drift";

/// %.17g: round-trips every double.
std::string format_double(double v);

void write_csv(std::ostream& out, std::span<const MetricSample> samples);

void write_oracle(std::ostream& out, const OracleSolution& oracle, bool with_allocation = true);

/// Fingerprint, oracle, final metrics and the time-to-eps table of one run.
void write_run_summary(std::ostream& out, const Scenario& scenario, const ProtocolRun& run,
                       const OracleSolution& oracle);

void write_comparison_summary(std::ostream& out, const Scenario& scenario, const ComparisonReport& report);

/// One distinct file name per run: "<kind>.csv", with "-<k>" appended when a
/// kind repeats.
std::vector<std::string> csv_names(std::span<const ProtocolRun> runs);

}  // namespace resalloc
