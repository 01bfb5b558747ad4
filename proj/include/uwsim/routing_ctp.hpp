#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "uwsim/engine.hpp"
#include "uwsim/mac.hpp"

namespace uwsim {

struct CtpConfig {
    double ewma_alpha = 0.9;        // retain factor, both planes
    double quality_floor = 0.01;    // keeps link ETX finite
    double trickle_i_min_s = 1.0;
    double trickle_i_max_s = 512.0;
    int trickle_redundancy_k = 2;
    double etx_inconsistency_jump = 1.5;
    int beacon_bytes = 5;
    double neighbor_timeout_s = 1536.0;
    int max_beacon_gap = 8;  // cap on inferred missed beacons per update
};

inline constexpr double kNoRouteEtx = std::numeric_limits<double>::infinity();

/// Per-neighbor link state fed by both planes: beacon_quality tracks
/// control-plane delivery (seqno gaps count as misses), data_quality tracks
/// data-plane ACK results.
struct NeighborEntry {
    double beacon_quality = 1.0;
    double data_quality = 0.0;
    bool has_data_samples = false;
    double advertised_path_etx = kNoRouteEtx;
    NodeId their_parent = kNoNode;
    std::uint32_t last_beacon_seqno = 0;
    SimTime last_heard = 0.0;

    double combined_quality() const {
        return has_data_samples ? 0.5 * beacon_quality + 0.5 * data_quality : beacon_quality;
    }
    double link_etx(double quality_floor) const {
        return 1.0 / std::max(quality_floor, combined_quality());
    }
};

/// Adaptive beacon timer: the interval doubles while the topology stays
/// consistent and snaps back to i_min on inconsistency; a beacon fires at a
/// uniform point in [I/2, I] unless redundancy_k consistent beacons were
/// already heard this interval.
struct TrickleState {
    double i_min_s = 1.0;
    double i_max_s = 512.0;
    double interval_s = 1.0;
    int redundancy_k = 2;
    int consistent_count = 0;
};

/// Simplified collection tree: ETX parent selection with strict-descent
/// forwarding, Trickle-timed beacons, a congestion-prone forwarding queue
/// shared with the MAC, and the diffusion extension (a destination-neighbor
/// field that delivers one hop away instead of forwarding to the parent).
class CtpRouter {
  public:
    enum class SendResult { queued, dropped_queue_full, no_route };

    struct SinkRecord {
        SimTime first_arrival = 0.0;
        double latency_s = 0.0;
        int hop_count = 0;
    };

    struct Counters {
        std::uint64_t originated = 0;
        std::uint64_t no_route = 0;
        std::uint64_t origin_dropped_queue = 0;
        std::uint64_t transit_rejected = 0;  // admission refused (queue/route/descent)
        std::uint64_t forwarded = 0;
        std::uint64_t beacons_sent = 0;
        std::uint64_t duplicates_at_sink = 0;
        std::uint64_t loops_detected = 0;  // a frame came back to a node it visited
    };

    CtpRouter(Engine& engine, Mac& mac, NodeId self, bool is_sink, CtpConfig config,
              RngStream trickle_rng);

    /// Arms the first Trickle interval `jitter_s` from now.
    void start(double jitter_s = 0.0);
    /// Same, with the jitter drawn from the router's own stream.
    void start_with_random_jitter(double max_jitter_s);

    /// Application send; collection traffic goes toward the current parent,
    /// diffusion traffic (dest_neighbor set) one hop to that neighbor.
    SendResult send(int payload_bytes, std::optional<NodeId> dest_neighbor, SimTime origin_time);

    /// MAC admission test for unicast data (no ACK when this refuses).
    bool can_accept(const Frame& frame) const;
    /// MAC upward delivery (data and beacon frames).
    void on_deliver(const Frame& frame);
    /// MAC unicast completion feedback; drives the data-plane estimator.
    void on_tx_outcome(const Frame& frame, bool success, int attempts);

    NodeId parent() const { return parent_; }
    double own_path_etx() const { return own_path_etx_; }
    bool has_route() const { return is_sink_ || parent_ != kNoNode; }
    const std::map<NodeId, NeighborEntry>& neighbors() const { return table_; }
    const TrickleState& trickle() const { return trickle_; }
    const Counters& counters() const { return counters_; }
    const std::map<std::pair<NodeId, std::uint32_t>, SinkRecord>& sink_table() const {
        return sink_table_;
    }

    /// Delivery to the application layer (sink arrivals and diffusion
    /// frames addressed to this node).
    std::function<void(const Frame&)> app_deliver;
    /// Invoked whenever a forwarded or originated collection frame fails
    /// after all retries (diagnostics only).
    std::function<void(const Frame&)> on_collection_failure;

    /// Test hook: overwrite a neighbor entry directly.
    void debug_set_neighbor(NodeId id, const NeighborEntry& entry);
    /// Recomputes link metrics, evicts stale entries, reselects the parent.
    /// Returns true when the route (parent or own ETX) changed materially.
    bool reselect_parent();

  private:
    void on_beacon(const Frame& frame);
    void on_data(const Frame& frame);
    void trickle_start_interval();
    void trickle_reset();
    void emit_beacon();

    Engine& engine_;
    Mac& mac_;
    NodeId self_;
    bool is_sink_;
    CtpConfig config_;
    RngStream rng_;

    std::map<NodeId, NeighborEntry> table_;
    NodeId parent_ = kNoNode;
    double own_path_etx_;
    std::uint32_t next_origin_seqno_ = 0;
    std::uint32_t next_beacon_seqno_ = 0;

    TrickleState trickle_;
    std::optional<EventId> trickle_fire_;
    std::optional<EventId> trickle_end_;

    std::map<std::pair<NodeId, std::uint32_t>, SinkRecord> sink_table_;
    Counters counters_;
};

}  // namespace uwsim
