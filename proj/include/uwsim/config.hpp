#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "uwsim/network.hpp"
#include "uwsim/scenarios.hpp"

namespace uwsim {

/// Raised for unknown keys, type mismatches, and a missing scenario.
/// The CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised for unwritable/unreadable paths. The CLI maps it to exit code 3.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Effective run configuration: scenario selection, trial fan-out, and
/// every tunable of the channel/radio/MAC/routing stack, addressable as
/// `section.key` strings from a config file or --set overrides.
struct SimConfig {
    std::string scenario;
    int trials = 20;
    std::uint64_t seed = 1;
    std::string outdir = "out";
    bool events_log = false;

    NetConfig net;
    GridSpec grid;

    // channel selection (net.channel is assembled from these)
    std::string channel_model = "linear";  // linear | freespace
    double channel_l_d0 = 47.40;
    double channel_slope_per_m = 10.45;
    double channel_eta = 2.0;
    double channel_d0 = 2.0;
    std::string channel_fading = "gaussian";  // none | gaussian
    double channel_sigma2_db2 = 0.56;

    // p2p sweep
    double p2p_distance_min = 4.0;
    double p2p_distance_max = 10.0;
    double p2p_distance_step = 0.25;
    std::vector<double> p2p_tx_powers{10.0, 20.0, 30.0};
    bool p2p_all_chains = false;
    int p2p_frames = 1000;
    double p2p_period_s = 1.0;
    int p2p_payload_bytes = 30;

    // routing sweep
    std::vector<double> routing_periods_s{5, 10, 15, 20, 25, 30, 40};
    int routing_packets_per_node = 25;
    double routing_warmup_s = 500.0;
    double routing_drain_s = 100.0;
    int routing_payload_bytes = 15;

    // diffusion-unicast sweep
    std::vector<double> diffusion_unicast_periods_s{5, 10, 20, 40};
    double diffusion_contention_period_s = 100.0;
    int diffusion_iterations = 8;
    double diffusion_warmup_s = 500.0;
    int diffusion_payload_bytes = 15;

    // diffusion-broadcast sweep
    std::vector<double> broadcast_deltas{0.0, 0.25, 0.5, 0.75, 1.0};
    int broadcast_packets = 100;
    double broadcast_spacing_s = 0.150;
    int broadcast_payload_bytes = 15;
    bool broadcast_use_n_factor = true;
    bool broadcast_synchronous = false;

    /// Builds net.channel / net.fading from the channel_* fields and
    /// validates the whole configuration. Throws ConfigError.
    void finalize();
};

/// Applies one `section.key=value` assignment. Throws ConfigError for
/// unknown keys or unparsable values.
void apply_assignment(SimConfig& config, const std::string& key, const std::string& value);

/// Parses `key=value` text with `[section]` headers; `#` comments allowed.
void load_config_file(SimConfig& config, const std::string& path);

/// The full effective configuration, one sorted `key=value` per line.
std::string effective_config(const SimConfig& config);

/// Every known key, sorted (used by the echo and the error messages).
std::vector<std::string> known_keys();

}  // namespace uwsim
