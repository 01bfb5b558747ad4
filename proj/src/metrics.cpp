#include "uwsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uwsim {

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t n = sorted.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    if (rank == 0) rank = 1;
    if (rank > n) rank = n;
    return sorted[rank - 1];
}

double PointSummary::latency_percentile(double q) const {
    return percentile(pooled_latencies_s, q);
}

PointSummary summarize(const std::string& label, const std::vector<TrialMetrics>& trials) {
    PointSummary s;
    s.label = label;
    s.trials = static_cast<int>(trials.size());
    std::vector<double> rates;
    rates.reserve(trials.size());
    for (const TrialMetrics& t : trials) {
        s.sent += t.sent;
        s.delivered += t.delivered;
        s.duplicates += t.duplicates;
        s.drop_queue += t.drop_queue;
        s.fail_retries += t.fail_retries;
        s.lost_noise += t.lost_noise;
        s.lost_collision += t.lost_collision;
        s.below_sensitivity += t.below_sensitivity;
        rates.push_back(t.success_rate());
        s.pooled_latencies_s.insert(s.pooled_latencies_s.end(), t.latencies_s.begin(),
                                    t.latencies_s.end());
    }
    s.success_mean = rates.empty() ? 0.0 : mean_of(rates);
    s.success_stderr = stderr_of(rates);
    std::sort(s.pooled_latencies_s.begin(), s.pooled_latencies_s.end());
    return s;
}

std::vector<HistogramBin> histogram(const std::vector<double>& samples, double bin_width) {
    std::vector<HistogramBin> bins;
    if (samples.empty() || bin_width <= 0.0) return bins;
    const double max_v = *std::max_element(samples.begin(), samples.end());
    const std::size_t n_bins = static_cast<std::size_t>(std::floor(max_v / bin_width)) + 1;
    bins.resize(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) {
        bins[i].lo = static_cast<double>(i) * bin_width;
        bins[i].hi = static_cast<double>(i + 1) * bin_width;
    }
    for (double v : samples) {
        std::size_t idx = static_cast<std::size_t>(std::floor(v / bin_width));
        if (idx >= n_bins) idx = n_bins - 1;
        ++bins[idx].count;
    }
    return bins;
}

}  // namespace uwsim
