#include "uwsim/medium.hpp"

#include <algorithm>
#include <cmath>

namespace uwsim {

const char* to_string(RxOutcome outcome) {
    switch (outcome) {
        case RxOutcome::delivered: return "delivered";
        case RxOutcome::lost_noise: return "lost-noise";
        case RxOutcome::lost_collision: return "lost-collision";
        case RxOutcome::below_sensitivity: return "below-sensitivity";
    }
    return "?";
}

Medium::Medium(Engine& engine, PathLossModel channel, FadingModel fading, RadioParams radio,
               std::vector<Position> positions, std::uint64_t master_seed, std::uint64_t trial)
    : engine_(engine),
      channel_(std::move(channel)),
      fading_(fading),
      radio_(radio),
      code_(conv_3_1_2_code()),
      positions_(std::move(positions)),
      nodes_(positions_.size()) {
    radio_.validate();
    fading_rng_.reserve(positions_.size());
    decision_rng_.reserve(positions_.size());
    for (std::size_t n = 0; n < positions_.size(); ++n) {
        fading_rng_.emplace_back(master_seed, trial, n, RngPurpose::fading);
        decision_rng_.emplace_back(master_seed, trial, n, RngPurpose::decision);
    }
}

RadioMode Medium::mode(NodeId node) const {
    const NodeState& st = nodes_[node];
    if (st.transmitting) return RadioMode::transmitting;
    return st.arrivals.empty() ? RadioMode::idle : RadioMode::receiving;
}

double Medium::deterministic_rx_dbm(NodeId from, NodeId to) const {
    const double d = distance(positions_[from], positions_[to]);
    return rx_power_dbm(radio_.tx_power_dbm, path_loss_db(channel_, d), 0.0);
}

bool Medium::begin_transmission(NodeId tx, const Frame& frame) {
    NodeState& sender = nodes_[tx];
    if (sender.transmitting) return false;

    const SimTime now = engine_.now();
    const double airtime = frame.airtime_s(radio_.data_rate_bps);
    const SimTime end = now + airtime;

    sender.transmitting = true;
    // Anything still arriving at the sender overlaps its own transmission.
    // Arrivals whose end coincides with `now` are already over the air.
    for (Arrival& a : sender.arrivals) {
        if (a.end > now) a.rx_was_transmitting = true;
    }

    // The tx-complete event goes in first: at the shared end instant the
    // sender's radio frees up before any receiver reacts to the frame, so a
    // reaction (an ACK, a forward) never sees the sender still busy.
    engine_.schedule(end, [this, tx] {
        nodes_[tx].transmitting = false;
        if (on_tx_complete_) on_tx_complete_(tx);
    });

    for (NodeId rx = 0; rx < static_cast<NodeId>(nodes_.size()); ++rx) {
        if (rx == tx) continue;
        const double d = distance(positions_[tx], positions_[rx]);
        const double fade = sample_fading(fading_, fading_rng_[rx]);
        const double rx_dbm = rx_power_dbm(radio_.tx_power_dbm, path_loss_db(channel_, d), fade);
        start_arrival(rx, frame, rx_dbm, end);
    }
    return true;
}

void Medium::start_arrival(NodeId rx, const Frame& frame, double rx_dbm, SimTime end) {
    NodeState& st = nodes_[rx];
    const SimTime now = engine_.now();

    Arrival a;
    a.key = next_arrival_key_++;
    a.frame = frame;
    a.rx_dbm = rx_dbm;
    a.rx_mw = std::pow(10.0, rx_dbm / 10.0);
    a.start = now;
    a.end = end;
    a.rx_was_transmitting = st.transmitting;

    // Existing in-flight arrivals and the newcomer interfere mutually.
    // Arrivals whose end coincides with `now` are spent: no overlap.
    double seen_by_new = 0.0;
    for (Arrival& other : st.arrivals) {
        if (!(other.end > now)) continue;
        seen_by_new += other.rx_mw;
    }
    a.worst_interference_mw = seen_by_new;

    st.arrivals.push_back(a);
    st.active_sum_mw += a.rx_mw;
    for (Arrival& other : st.arrivals) {
        if (other.key == a.key || !(other.end > now)) continue;
        const double interference = st.active_sum_mw - other.rx_mw;
        other.worst_interference_mw = std::max(other.worst_interference_mw, interference);
    }

    const std::uint64_t key = a.key;
    engine_.schedule(end, [this, rx, key] { finish_arrival(rx, key); });
}

void Medium::finish_arrival(NodeId rx, std::uint64_t arrival_key) {
    NodeState& st = nodes_[rx];
    auto it = std::find_if(st.arrivals.begin(), st.arrivals.end(),
                           [arrival_key](const Arrival& a) { return a.key == arrival_key; });
    if (it == st.arrivals.end()) return;
    const Arrival arrival = *it;
    st.active_sum_mw = std::max(0.0, st.active_sum_mw - arrival.rx_mw);
    st.arrivals.erase(it);
    decide_reception(rx, arrival);
}

void Medium::decide_reception(NodeId rx, const Arrival& arrival) {
    RxOutcome outcome;
    if (arrival.rx_dbm < radio_.sensitivity_dbm) {
        outcome = RxOutcome::below_sensitivity;
    } else if (arrival.rx_was_transmitting) {
        outcome = RxOutcome::lost_collision;
    } else {
        const double snr =
            snr_db(arrival.rx_dbm, radio_.noise_floor_dbm, arrival.worst_interference_mw);
        double ber = fsk_ber(snr, radio_);
        if (radio_.coding == CodingType::conv_3_1_2) ber = coded_ber(ber, code_);
        const double p_ok = frame_success_probability(ber, arrival.frame.total_bits());
        const double u = decision_rng_[rx].uniform();
        if (u < p_ok) {
            outcome = RxOutcome::delivered;
        } else {
            outcome = arrival.worst_interference_mw > 0.0 ? RxOutcome::lost_collision
                                                          : RxOutcome::lost_noise;
        }
    }
    if (on_outcome_) on_outcome_(rx, arrival.frame, outcome, arrival.rx_dbm);
    if (outcome == RxOutcome::delivered && on_deliver_) on_deliver_(rx, arrival.frame);
}

}  // namespace uwsim
