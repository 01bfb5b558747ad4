#include "uwsim/routing_ctp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace uwsim {

CtpRouter::CtpRouter(Engine& engine, Mac& mac, NodeId self, bool is_sink, CtpConfig config,
                     RngStream trickle_rng)
    : engine_(engine),
      mac_(mac),
      self_(self),
      is_sink_(is_sink),
      config_(config),
      rng_(trickle_rng),
      own_path_etx_(is_sink ? 0.0 : kNoRouteEtx) {
    trickle_.i_min_s = config_.trickle_i_min_s;
    trickle_.i_max_s = config_.trickle_i_max_s;
    trickle_.interval_s = config_.trickle_i_min_s;
    trickle_.redundancy_k = config_.trickle_redundancy_k;
}

void CtpRouter::start(double jitter_s) {
    engine_.schedule(engine_.now() + jitter_s, [this] { trickle_start_interval(); });
}

void CtpRouter::start_with_random_jitter(double max_jitter_s) {
    start(rng_.uniform(0.0, max_jitter_s));
}

void CtpRouter::trickle_start_interval() {
    trickle_.consistent_count = 0;
    const SimTime start = engine_.now();
    const SimTime fire = start + rng_.uniform(trickle_.interval_s / 2.0, trickle_.interval_s);
    trickle_fire_ = engine_.schedule(fire, [this] {
        if (trickle_.consistent_count < trickle_.redundancy_k) emit_beacon();
    });
    trickle_end_ = engine_.schedule(start + trickle_.interval_s, [this] {
        trickle_.interval_s = std::min(2.0 * trickle_.interval_s, trickle_.i_max_s);
        trickle_start_interval();
    });
}

void CtpRouter::trickle_reset() {
    if (trickle_.interval_s <= trickle_.i_min_s && !trickle_fire_) return;  // not armed yet
    if (trickle_fire_) engine_.cancel(*trickle_fire_);
    if (trickle_end_) engine_.cancel(*trickle_end_);
    trickle_fire_.reset();
    trickle_end_.reset();
    trickle_.interval_s = trickle_.i_min_s;
    trickle_start_interval();
}

void CtpRouter::emit_beacon() {
    Frame beacon;
    beacon.kind = FrameKind::beacon;
    beacon.payload_len = config_.beacon_bytes;
    beacon.beacon_has_route = has_route();
    beacon.beacon_path_etx = own_path_etx_;
    beacon.beacon_parent = parent_;
    beacon.beacon_seqno = next_beacon_seqno_++;
    if (mac_.send_broadcast(beacon) == Mac::SendResult::queued) ++counters_.beacons_sent;
}

void CtpRouter::debug_set_neighbor(NodeId id, const NeighborEntry& entry) { table_[id] = entry; }

bool CtpRouter::reselect_parent() {
    const NodeId old_parent = parent_;
    const double old_etx = own_path_etx_;

    // Evict silent neighbors.
    const SimTime now = engine_.now();
    for (auto it = table_.begin(); it != table_.end();) {
        if (now - it->second.last_heard > config_.neighbor_timeout_s) {
            it = table_.erase(it);
        } else {
            ++it;
        }
    }

    if (!is_sink_) {
        NodeId best = kNoNode;
        double best_cost = kNoRouteEtx;
        for (const auto& [id, entry] : table_) {
            if (std::isinf(entry.advertised_path_etx)) continue;
            // Nodes advertising a cost at or above ours are potential
            // descendants; routing through them could loop.
            if (!(entry.advertised_path_etx < own_path_etx_)) continue;
            const double cost = entry.advertised_path_etx + entry.link_etx(config_.quality_floor);
            if (cost < best_cost) {
                best_cost = cost;
                best = id;
            }
        }
        parent_ = best;
        own_path_etx_ = best == kNoNode ? kNoRouteEtx : best_cost;
    }

    const bool parent_changed = parent_ != old_parent;
    const bool etx_jumped =
        (std::isinf(old_etx) != std::isinf(own_path_etx_)) ||
        (std::isfinite(old_etx) && std::isfinite(own_path_etx_) &&
         std::abs(own_path_etx_ - old_etx) > config_.etx_inconsistency_jump);
    return parent_changed || etx_jumped;
}

void CtpRouter::on_beacon(const Frame& frame) {
    const NodeId from = frame.origin;
    const double alpha = config_.ewma_alpha;

    auto it = table_.find(from);
    bool inconsistent = false;
    if (it == table_.end()) {
        NeighborEntry entry;
        entry.beacon_quality = 1.0;  // first heard beacon counts as a success
        entry.last_beacon_seqno = frame.beacon_seqno;
        it = table_.emplace(from, entry).first;
    } else {
        NeighborEntry& e = it->second;
        long gap = static_cast<long>(frame.beacon_seqno) - static_cast<long>(e.last_beacon_seqno) - 1;
        if (gap < 0) gap = 0;  // restarted origin: keep history
        gap = std::min<long>(gap, config_.max_beacon_gap);
        for (long i = 0; i < gap; ++i) e.beacon_quality *= alpha;           // missed beacons
        e.beacon_quality = alpha * e.beacon_quality + (1.0 - alpha) * 1.0;  // this one arrived
        e.last_beacon_seqno = frame.beacon_seqno;

        const double new_adv = frame.beacon_has_route ? frame.beacon_path_etx : kNoRouteEtx;
        if (std::isfinite(e.advertised_path_etx) && std::isfinite(new_adv) &&
            std::abs(new_adv - e.advertised_path_etx) > config_.etx_inconsistency_jump) {
            inconsistent = true;
        }
    }
    NeighborEntry& entry = it->second;
    entry.advertised_path_etx = frame.beacon_has_route ? frame.beacon_path_etx : kNoRouteEtx;
    entry.their_parent = frame.beacon_parent;
    entry.last_heard = engine_.now();

    // A parent that lists us as its parent is a routing loop.
    if (from == parent_ && frame.beacon_parent == self_) inconsistent = true;

    const bool route_changed = reselect_parent();
    if (inconsistent || route_changed) {
        trickle_reset();
    } else {
        ++trickle_.consistent_count;
    }
}

CtpRouter::SendResult CtpRouter::send(int payload_bytes, std::optional<NodeId> dest_neighbor,
                                      SimTime origin_time) {
    ++counters_.originated;

    NodeId next_hop;
    if (dest_neighbor) {
        next_hop = *dest_neighbor;
    } else if (parent_ != kNoNode) {
        next_hop = parent_;
    } else {
        ++counters_.no_route;
        return SendResult::no_route;
    }

    RoutingHeader h;
    h.origin = self_;
    h.origin_seqno = next_origin_seqno_++;
    h.path_etx = own_path_etx_;
    h.hop_parent = self_;
    h.dest_neighbor = dest_neighbor;
    h.origin_time = origin_time;
    h.hops = {self_};

    Frame f;
    f.kind = FrameKind::data;
    f.payload_len = payload_bytes;
    f.routing = std::move(h);

    if (mac_.send_unicast(next_hop, std::move(f)) == Mac::SendResult::queue_full) {
        ++counters_.origin_dropped_queue;
        return SendResult::dropped_queue_full;
    }
    return SendResult::queued;
}

bool CtpRouter::can_accept(const Frame& frame) const {
    if (frame.kind != FrameKind::data || !frame.routing) return true;
    const RoutingHeader& h = *frame.routing;
    if (h.dest_neighbor) return *h.dest_neighbor == self_;
    if (is_sink_) return true;
    // Transit admission: must have room, a parent, and make ETX progress.
    if (parent_ == kNoNode) return false;
    if (!(own_path_etx_ < h.path_etx)) return false;
    if (mac_.queue_len() >= mac_.config().queue_capacity) return false;
    return true;
}

void CtpRouter::on_deliver(const Frame& frame) {
    if (frame.kind == FrameKind::beacon) {
        on_beacon(frame);
        return;
    }
    if (frame.kind == FrameKind::data && frame.routing) {
        on_data(frame);
        return;
    }
    if (app_deliver) app_deliver(frame);  // unrouted application traffic
}

void CtpRouter::on_data(const Frame& frame) {
    const RoutingHeader& h = *frame.routing;
    if (std::find(h.hops.begin(), h.hops.end(), self_) != h.hops.end()) {
        ++counters_.loops_detected;  // dedup/descent should make this unreachable
    }

    if (h.dest_neighbor) {
        // Diffusion traffic terminates at the destination neighbor.
        if (*h.dest_neighbor == self_ && app_deliver) app_deliver(frame);
        return;
    }

    if (is_sink_) {
        const auto key = std::make_pair(h.origin, h.origin_seqno);
        auto [it, fresh] = sink_table_.try_emplace(key);
        if (!fresh) {
            ++counters_.duplicates_at_sink;
            return;
        }
        it->second.first_arrival = engine_.now();
        it->second.latency_s = engine_.now() - h.origin_time;
        it->second.hop_count = static_cast<int>(h.hops.size());
        if (app_deliver) app_deliver(frame);
        return;
    }

    // Forward toward our parent. Admission checked queue room before the
    // ACK went out, so the enqueue cannot fail here.
    assert(parent_ != kNoNode);
    Frame fwd = frame;
    fwd.routing->path_etx = own_path_etx_;
    fwd.routing->hop_parent = self_;
    fwd.routing->hops.push_back(self_);
    const auto res = mac_.send_unicast(parent_, std::move(fwd));
    assert(res == Mac::SendResult::queued);
    (void)res;
    ++counters_.forwarded;
}

void CtpRouter::on_tx_outcome(const Frame& frame, bool success, int attempts) {
    if (frame.kind != FrameKind::data) return;
    const NodeId link = frame.mac_dest;
    auto it = table_.find(link);
    if (it != table_.end()) {
        NeighborEntry& e = it->second;
        const double alpha = config_.ewma_alpha;
        if (!e.has_data_samples) {
            e.has_data_samples = true;
            e.data_quality = 1.0;  // optimistic start, like the beacon plane
        }
        // Every physical attempt is one sample: timeouts miss, the ack hits.
        const int misses = success ? attempts - 1 : attempts;
        for (int i = 0; i < misses; ++i) e.data_quality *= alpha;
        if (success) e.data_quality = alpha * e.data_quality + (1.0 - alpha);
    }
    if (reselect_parent()) trickle_reset();
    if (!success && frame.routing && !frame.routing->dest_neighbor && on_collection_failure) {
        on_collection_failure(frame);
    }
}

}  // namespace uwsim
