#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace uwsim {

/// Per-trial counters plus latency samples for delivered packets.
struct TrialMetrics {
    std::uint64_t sent = 0;       // unique packets (or expected deliveries)
    std::uint64_t delivered = 0;  // unique deliveries
    std::uint64_t duplicates = 0;
    std::uint64_t no_route = 0;
    std::uint64_t drop_queue = 0;
    std::uint64_t fail_retries = 0;
    std::uint64_t lost_noise = 0;
    std::uint64_t lost_collision = 0;
    std::uint64_t below_sensitivity = 0;
    std::vector<double> latencies_s;

    double success_rate() const {
        return sent == 0 ? 0.0 : static_cast<double>(delivered) / static_cast<double>(sent);
    }
};

/// Aggregate of one parameter point over independent trials.
struct PointSummary {
    std::string label;
    int trials = 0;
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t drop_queue = 0;
    std::uint64_t fail_retries = 0;
    std::uint64_t lost_noise = 0;
    std::uint64_t lost_collision = 0;
    std::uint64_t below_sensitivity = 0;
    double success_mean = 0.0;
    double success_stderr = 0.0;
    std::vector<double> pooled_latencies_s;  // sorted

    double latency_percentile(double q) const;  // nearest-rank; NaN when empty
};

PointSummary summarize(const std::string& label, const std::vector<TrialMetrics>& trials);

/// Nearest-rank percentile of a sorted sample; NaN on empty input.
double percentile(const std::vector<double>& sorted, double q);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::uint64_t count = 0;
};

/// Fixed-width histogram from 0 to the sample maximum.
std::vector<HistogramBin> histogram(const std::vector<double>& samples, double bin_width);

double mean_of(const std::vector<double>& v);
double stderr_of(const std::vector<double>& v);  // sample sd / sqrt(n)

}  // namespace uwsim
