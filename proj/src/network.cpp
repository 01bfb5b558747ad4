#include "uwsim/network.hpp"

namespace uwsim {

Network::Network(NetConfig config, std::vector<Position> positions, std::uint64_t master_seed,
                 std::uint64_t trial)
    : config_(std::move(config)), master_seed_(master_seed), trial_(trial) {
    const NodeId n = static_cast<NodeId>(positions.size());

    for (NodeId id = 0; id < n; ++id) {
        RngStream clock_rng(master_seed_, trial_, id, RngPurpose::clock);
        NodeClock clock;
        clock.drift_ppm = clock_rng.uniform(-config_.drift_max_ppm, config_.drift_max_ppm);
        engine_.set_clock(id, clock);
    }

    medium_ = std::make_unique<Medium>(engine_, config_.channel, config_.fading, config_.radio,
                                       std::move(positions), master_seed_, trial_);

    macs_.reserve(n);
    routers_.resize(n);
    for (NodeId id = 0; id < n; ++id) {
        RngStream mac_rng(master_seed_, trial_, id, RngPurpose::mac);
        macs_.push_back(std::make_unique<Mac>(
            engine_, *medium_, id, config_.mac, mac_rng,
            [this](const MacLogRecord& rec) {
                if (log) log(rec);
            }));
    }
    if (config_.with_routing) {
        for (NodeId id = 0; id < n; ++id) {
            RngStream trickle_rng(master_seed_, trial_, id, RngPurpose::trickle);
            routers_[id] = std::make_unique<CtpRouter>(engine_, *macs_[id], id,
                                                       id == config_.sink, config_.ctp, trickle_rng);
        }
    }

    for (NodeId id = 0; id < n; ++id) {
        Mac::Callbacks& cb = macs_[id]->callbacks();
        if (routers_[id]) {
            CtpRouter* router = routers_[id].get();
            cb.accept = [router](const Frame& f) { return router->can_accept(f); };
            cb.deliver = [router](const Frame& f) { router->on_deliver(f); };
            cb.tx_done = [router](const Frame& f, bool ok, int attempts) {
                router->on_tx_outcome(f, ok, attempts);
            };
            router->app_deliver = [this, id](const Frame& f) {
                if (on_app_deliver) on_app_deliver(id, f);
            };
        } else {
            cb.deliver = [this, id](const Frame& f) {
                if (on_app_deliver) on_app_deliver(id, f);
            };
        }
    }

    medium_->set_deliver_handler([this](NodeId rx, const Frame& f) { macs_[rx]->on_decoded(f); });
    medium_->set_tx_complete_handler([this](NodeId tx) { macs_[tx]->on_radio_idle(); });
    medium_->set_outcome_handler([this](NodeId rx, const Frame& f, RxOutcome out, double rx_dbm) {
        if (on_rx_outcome) on_rx_outcome(rx, f, out, rx_dbm);
        // Loss records are logged at intended receivers only: the unicast
        // destination, or any receiver of a broadcast frame (whose dest
        // column then carries the receiving node instead of the wildcard).
        const bool intended = f.mac_dest == kBroadcastAddr || f.mac_dest == rx;
        if (out != RxOutcome::delivered && intended && log) {
            const NodeId dest = f.mac_dest == kBroadcastAddr ? rx : f.mac_dest;
            log(MacLogRecord{engine_.now(), f.origin, dest, f.seqno, to_string(out)});
        }
    });
}

void Network::start_routing(double max_jitter_s) {
    for (NodeId id = 0; id < node_count(); ++id) {
        if (routers_[id]) routers_[id]->start_with_random_jitter(max_jitter_s);
    }
}

RngStream Network::app_rng(NodeId node) const {
    return RngStream(master_seed_, trial_, node, RngPurpose::app);
}

}  // namespace uwsim
