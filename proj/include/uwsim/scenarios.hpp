#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "uwsim/metrics.hpp"
#include "uwsim/network.hpp"

namespace uwsim {

/// 3x7 grid spanning 42 x 18 m: node k sits at (dx*(k%cols), dy*(k/cols)).
struct GridSpec {
    int rows = 3;
    int cols = 7;
    double dx = 7.0;
    double dy = 9.0;

    int node_count() const { return rows * cols; }
};

std::vector<Position> build_grid(const GridSpec& spec);

/// Point-to-point: one broadcaster, one listener, raw PHY success rate.
struct P2pParams {
    double distance_m = 7.0;
    int frames = 1000;
    double period_s = 1.0;
    int payload_bytes = 30;
};

TrialMetrics run_p2p_trial(const P2pParams& params, const NetConfig& net, std::uint64_t master_seed,
                           std::uint64_t trial, std::vector<MacLogRecord>* trace = nullptr);

/// Collection scenario: every non-sink node originates periodic packets
/// after a warm-up that lets the tree form; delivery is counted once per
/// unique (origin, seqno) at the sink.
struct RoutingParams {
    GridSpec grid;
    double packet_period_s = 25.0;
    int packets_per_node = 25;
    double warmup_s = 500.0;
    double drain_s = 100.0;
    int payload_bytes = 15;
};

/// One sink-table row, exported by the batch runner as sink_deliveries.csv.
struct SinkDeliveryRecord {
    SimTime arrival_time = 0.0;
    NodeId origin = kNoNode;
    std::uint32_t seqno = 0;
    double latency_s = 0.0;
    int hop_count = 0;
};

TrialMetrics run_routing_trial(const RoutingParams& params, const NetConfig& net,
                               std::uint64_t master_seed, std::uint64_t trial,
                               std::vector<MacLogRecord>* trace = nullptr,
                               std::vector<SinkDeliveryRecord>* deliveries = nullptr);

/// Neighbor-exchange scenario over the same grid: per iteration each node
/// unicasts its payload to every discovered neighbor, pacing transmissions
/// by the unicast period and iterating every contention period.
struct DiffusionUnicastParams {
    GridSpec grid;
    double unicast_period_s = 5.0;
    double contention_period_s = 100.0;
    int iterations = 8;
    double warmup_s = 500.0;
    int payload_bytes = 15;
};

TrialMetrics run_diffusion_unicast_trial(const DiffusionUnicastParams& params, const NetConfig& net,
                                         std::uint64_t master_seed, std::uint64_t trial,
                                         std::vector<MacLogRecord>* trace = nullptr);

/// Slotted broadcast start times: delta * P * T_p * N * i (the N factor can
/// be dropped for tighter slots; delta = 1 reproduces the synchronous TDMA
/// schedule, delta = 0 makes every node start together).
struct BroadcastSchedule {
    int p_packets = 100;
    double t_p_s = 0.150;
    int n_nodes = 21;
    double delta = 1.0;
    bool use_n_factor = true;
    bool synchronous = false;  // ignore delta, use the TDMA formula directly
};

double broadcast_start_time_s(int node_index, const BroadcastSchedule& sched);

struct BroadcastParams {
    GridSpec grid;
    BroadcastSchedule schedule;
    int payload_bytes = 15;
};

/// Success is counted over (transmitter, in-range receiver, frame) triples,
/// where in-range means the fade-free received power reaches sensitivity.
/// `trace` (optional) captures the full MAC event log for trace-equality
/// checks.
TrialMetrics run_broadcast_trial(const BroadcastParams& params, const NetConfig& net,
                                 std::uint64_t master_seed, std::uint64_t trial,
                                 std::vector<MacLogRecord>* trace = nullptr);

/// Runs `trials` independent seeded repetitions of `one_trial`.
template <typename Fn>
std::vector<TrialMetrics> run_trials(int trials, Fn&& one_trial) {
    std::vector<TrialMetrics> out;
    out.reserve(trials);
    for (int t = 0; t < trials; ++t) out.push_back(one_trial(static_cast<std::uint64_t>(t)));
    return out;
}

}  // namespace uwsim
