#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "uwsim/channel.hpp"
#include "uwsim/engine.hpp"
#include "uwsim/radio.hpp"

namespace uwsim {

enum class RxOutcome { delivered, lost_noise, lost_collision, below_sensitivity };

const char* to_string(RxOutcome outcome);

enum class RadioMode { idle, transmitting, receiving };

/// Shared half-duplex medium: propagates every transmission to every other
/// node with path loss plus an independent fade, tracks overlapping
/// arrivals as additive interference power, and decides reception when a
/// frame's airtime completes.
///
/// Loss taxonomy per (frame, receiver):
///   - below_sensitivity: faded rx power under the sensitivity threshold;
///   - lost_collision:    receiver transmitted during any part of the
///                        arrival (self-deafness), or the success draw
///                        failed while co-channel interference was present;
///   - lost_noise:        the success draw failed on a clean channel.
/// The BER chain sees the worst-case interference level over the airtime.
class Medium {
  public:
    using DeliverFn = std::function<void(NodeId rx, const Frame&)>;
    using OutcomeFn = std::function<void(NodeId rx, const Frame&, RxOutcome, double rx_dbm)>;
    using TxCompleteFn = std::function<void(NodeId tx)>;

    Medium(Engine& engine, PathLossModel channel, FadingModel fading, RadioParams radio,
           std::vector<Position> positions, std::uint64_t master_seed, std::uint64_t trial);

    /// Starts a transmission now. Returns false (busy error, surfaced to the
    /// MAC) if the node is already transmitting.
    bool begin_transmission(NodeId tx, const Frame& frame);

    void set_deliver_handler(DeliverFn fn) { on_deliver_ = std::move(fn); }
    void set_outcome_handler(OutcomeFn fn) { on_outcome_ = std::move(fn); }
    void set_tx_complete_handler(TxCompleteFn fn) { on_tx_complete_ = std::move(fn); }

    bool transmitting(NodeId node) const { return nodes_[node].transmitting; }
    RadioMode mode(NodeId node) const;
    double current_interference_mw(NodeId node) const { return nodes_[node].active_sum_mw; }
    std::size_t node_count() const { return nodes_.size(); }
    const RadioParams& radio() const { return radio_; }
    const Position& position(NodeId node) const { return positions_[node]; }

    /// Mean received power without fading; used for in-range bookkeeping.
    double deterministic_rx_dbm(NodeId from, NodeId to) const;

  private:
    struct Arrival {
        std::uint64_t key = 0;
        Frame frame;
        double rx_dbm = 0.0;
        double rx_mw = 0.0;
        SimTime start = 0.0;
        SimTime end = 0.0;
        double worst_interference_mw = 0.0;
        bool rx_was_transmitting = false;
    };

    struct NodeState {
        bool transmitting = false;
        double active_sum_mw = 0.0;     // total power of in-flight arrivals
        std::vector<Arrival> arrivals;  // in-flight only
    };

    void start_arrival(NodeId rx, const Frame& frame, double rx_dbm, SimTime end);
    void finish_arrival(NodeId rx, std::uint64_t arrival_key);
    void decide_reception(NodeId rx, const Arrival& arrival);

    Engine& engine_;
    PathLossModel channel_;
    FadingModel fading_;
    RadioParams radio_;
    CodeSpec code_;
    std::vector<Position> positions_;
    std::vector<NodeState> nodes_;
    std::vector<RngStream> fading_rng_;
    std::vector<RngStream> decision_rng_;
    std::uint64_t next_arrival_key_ = 1;

    DeliverFn on_deliver_;
    OutcomeFn on_outcome_;
    TxCompleteFn on_tx_complete_;
};

}  // namespace uwsim
