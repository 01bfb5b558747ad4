#pragma once

#include <string>
#include <vector>

#include "uwsim/config.hpp"
#include "uwsim/metrics.hpp"

namespace uwsim {

/// Runs every parameter point of the configured scenario across the trial
/// fan-out and writes summary.csv, latency_hist.csv, effective_config.txt,
/// sink_deliveries.csv (routing runs) and events.csv (when enabled) under
/// config.outdir. Trials run sequentially, so outputs are byte-stable for a
/// given (config, seed).
void run_batch(const SimConfig& config);

/// The per-point aggregation behind run_batch, exposed for tests and the
/// acceptance suite.
std::vector<PointSummary> run_scenario_points(const SimConfig& config,
                                              std::vector<MacLogRecord>* events = nullptr);

std::string summary_csv(const std::vector<PointSummary>& points, const std::string& scenario);
std::string latency_hist_csv(const std::vector<PointSummary>& points, double bin_width_s);
std::string events_csv(const std::vector<MacLogRecord>& records);

}  // namespace uwsim
