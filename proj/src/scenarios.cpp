#include "uwsim/scenarios.hpp"

#include <algorithm>
#include <cmath>

namespace uwsim {

std::vector<Position> build_grid(const GridSpec& spec) {
    std::vector<Position> pos;
    pos.reserve(spec.node_count());
    for (int k = 0; k < spec.node_count(); ++k) {
        pos.push_back(Position{spec.dx * (k % spec.cols), spec.dy * (k / spec.cols)});
    }
    return pos;
}

namespace {

/// Folds a reception outcome into the per-cause loss counters. Only
/// outcomes at an intended receiver count (the unicast destination, or any
/// receiver of a broadcast frame).
void count_outcome(TrialMetrics& m, NodeId rx, const Frame& f, RxOutcome out) {
    if (f.mac_dest != kBroadcastAddr && f.mac_dest != rx) return;
    switch (out) {
        case RxOutcome::lost_noise: ++m.lost_noise; break;
        case RxOutcome::lost_collision: ++m.lost_collision; break;
        case RxOutcome::below_sensitivity: ++m.below_sensitivity; break;
        case RxOutcome::delivered: break;
    }
}

void fold_mac_counters(TrialMetrics& m, Network& net) {
    for (NodeId id = 0; id < net.node_count(); ++id) {
        const Mac::Counters& c = net.mac(id).counters();
        m.drop_queue += c.dropped_queue_full;
        m.fail_retries += c.failed_retries;
    }
}

}  // namespace

TrialMetrics run_p2p_trial(const P2pParams& params, const NetConfig& net_config,
                           std::uint64_t master_seed, std::uint64_t trial,
                           std::vector<MacLogRecord>* trace) {
    NetConfig cfg = net_config;
    cfg.with_routing = false;
    Network net(cfg, {Position{0.0, 0.0}, Position{params.distance_m, 0.0}}, master_seed, trial);
    if (trace) net.log = [trace](const MacLogRecord& rec) { trace->push_back(rec); };

    TrialMetrics metrics;
    metrics.sent = params.frames;
    net.on_rx_outcome = [&](NodeId rx, const Frame& f, RxOutcome out, double) {
        count_outcome(metrics, rx, f, out);
        if (out == RxOutcome::delivered && rx == 1) ++metrics.delivered;
    };

    for (int k = 0; k < params.frames; ++k) {
        net.engine().schedule(params.period_s * k, [&net, &params] {
            Frame f;
            f.kind = FrameKind::data;
            f.payload_len = params.payload_bytes;
            net.mac(0).send_broadcast(f);
        });
    }
    net.engine().run_until(params.period_s * params.frames + 5.0);
    fold_mac_counters(metrics, net);
    return metrics;
}

TrialMetrics run_routing_trial(const RoutingParams& params, const NetConfig& net_config,
                               std::uint64_t master_seed, std::uint64_t trial,
                               std::vector<MacLogRecord>* trace,
                               std::vector<SinkDeliveryRecord>* deliveries) {
    NetConfig cfg = net_config;
    cfg.with_routing = true;
    cfg.sink = 0;
    Network net(cfg, build_grid(params.grid), master_seed, trial);
    if (trace) net.log = [trace](const MacLogRecord& rec) { trace->push_back(rec); };

    TrialMetrics metrics;
    net.on_rx_outcome = [&](NodeId rx, const Frame& f, RxOutcome out, double) {
        count_outcome(metrics, rx, f, out);
    };

    net.start_routing();

    std::vector<RngStream> app;
    for (NodeId id = 0; id < net.node_count(); ++id) app.push_back(net.app_rng(id));

    for (NodeId id = 1; id < net.node_count(); ++id) {
        const double phase = app[id].uniform(0.0, params.packet_period_s);
        for (int k = 0; k < params.packets_per_node; ++k) {
            const SimTime at = params.warmup_s + phase + params.packet_period_s * k;
            net.engine().schedule(at, [&net, id, &params] {
                net.router(id).send(params.payload_bytes, std::nullopt, net.engine().now());
            });
        }
    }

    const SimTime end =
        params.warmup_s + params.packet_period_s * params.packets_per_node + params.drain_s;
    net.engine().run_until(end);

    metrics.sent = static_cast<std::uint64_t>(params.packets_per_node) *
                   static_cast<std::uint64_t>(net.node_count() - 1);
    const CtpRouter& sink = net.router(cfg.sink);
    metrics.delivered = sink.sink_table().size();
    metrics.duplicates = sink.counters().duplicates_at_sink;
    for (const auto& [key, rec] : sink.sink_table()) {
        metrics.latencies_s.push_back(rec.latency_s);
        if (deliveries) {
            deliveries->push_back(SinkDeliveryRecord{rec.first_arrival, key.first, key.second,
                                                     rec.latency_s, rec.hop_count});
        }
    }
    for (NodeId id = 1; id < net.node_count(); ++id) {
        metrics.no_route += net.router(id).counters().no_route;
        metrics.drop_queue += net.router(id).counters().origin_dropped_queue;
    }
    fold_mac_counters(metrics, net);
    return metrics;
}

TrialMetrics run_diffusion_unicast_trial(const DiffusionUnicastParams& params,
                                         const NetConfig& net_config, std::uint64_t master_seed,
                                         std::uint64_t trial, std::vector<MacLogRecord>* trace) {
    NetConfig cfg = net_config;
    cfg.with_routing = true;
    cfg.sink = 0;
    Network net(cfg, build_grid(params.grid), master_seed, trial);
    if (trace) net.log = [trace](const MacLogRecord& rec) { trace->push_back(rec); };

    TrialMetrics metrics;
    net.on_rx_outcome = [&](NodeId rx, const Frame& f, RxOutcome out, double) {
        count_outcome(metrics, rx, f, out);
    };
    net.on_app_deliver = [&](NodeId self, const Frame& f) {
        if (f.routing && f.routing->dest_neighbor && *f.routing->dest_neighbor == self) {
            ++metrics.delivered;
            metrics.latencies_s.push_back(net.engine().now() - f.routing->origin_time);
        }
    };

    net.start_routing();

    std::vector<RngStream> app;
    for (NodeId id = 0; id < net.node_count(); ++id) app.push_back(net.app_rng(id));

    // Each iteration a node sends its payload to every neighbor it has
    // discovered so far, one unicast per unicast period.
    for (NodeId id = 0; id < net.node_count(); ++id) {
        const double phase = app[id].uniform(0.0, params.unicast_period_s);
        for (int it = 0; it < params.iterations; ++it) {
            const SimTime start = params.warmup_s + params.contention_period_s * it + phase;
            net.engine().schedule(start, [&net, &metrics, id, &params] {
                std::vector<NodeId> neighbors;
                for (const auto& [nbr, entry] : net.router(id).neighbors()) neighbors.push_back(nbr);
                for (std::size_t j = 0; j < neighbors.size(); ++j) {
                    const NodeId dest = neighbors[j];
                    ++metrics.sent;
                    net.engine().schedule(
                        net.engine().now() + params.unicast_period_s * static_cast<double>(j),
                        [&net, id, dest, &params] {
                            net.router(id).send(params.payload_bytes, dest, net.engine().now());
                        });
                }
            });
        }
    }

    const SimTime end = params.warmup_s + params.contention_period_s * params.iterations +
                        params.contention_period_s;
    net.engine().run_until(end);
    fold_mac_counters(metrics, net);
    return metrics;
}

double broadcast_start_time_s(int node_index, const BroadcastSchedule& sched) {
    const double slot = static_cast<double>(sched.p_packets) * sched.t_p_s *
                        (sched.use_n_factor ? static_cast<double>(sched.n_nodes) : 1.0);
    const double synchronous_start = slot * static_cast<double>(node_index);
    return sched.synchronous ? synchronous_start : sched.delta * synchronous_start;
}

TrialMetrics run_broadcast_trial(const BroadcastParams& params, const NetConfig& net_config,
                                 std::uint64_t master_seed, std::uint64_t trial,
                                 std::vector<MacLogRecord>* trace) {
    NetConfig cfg = net_config;
    cfg.with_routing = false;
    Network net(cfg, build_grid(params.grid), master_seed, trial);
    BroadcastSchedule sched = params.schedule;
    sched.n_nodes = net.node_count();

    // In-range receivers per transmitter: fade-free rx power at or above
    // sensitivity. The channel is symmetric, so these sets are mutual.
    const double sens = cfg.radio.sensitivity_dbm;
    std::vector<std::vector<bool>> in_range(net.node_count(),
                                            std::vector<bool>(net.node_count(), false));
    std::uint64_t pairs = 0;
    for (NodeId tx = 0; tx < net.node_count(); ++tx) {
        for (NodeId rx = 0; rx < net.node_count(); ++rx) {
            if (tx == rx) continue;
            in_range[tx][rx] = net.medium().deterministic_rx_dbm(tx, rx) >= sens;
            if (in_range[tx][rx]) ++pairs;
        }
    }

    TrialMetrics metrics;
    metrics.sent = pairs * static_cast<std::uint64_t>(sched.p_packets);
    net.on_rx_outcome = [&](NodeId rx, const Frame& f, RxOutcome out, double) {
        if (!in_range[f.origin][rx]) return;
        count_outcome(metrics, rx, f, out);
        if (out == RxOutcome::delivered) ++metrics.delivered;
    };
    if (trace) {
        net.log = [trace](const MacLogRecord& rec) { trace->push_back(rec); };
    }

    SimTime last_local = 0.0;
    for (NodeId id = 0; id < net.node_count(); ++id) {
        const double start = broadcast_start_time_s(id, sched);
        for (int k = 0; k < sched.p_packets; ++k) {
            const SimTime at_local = start + sched.t_p_s * static_cast<double>(k);
            last_local = std::max(last_local, at_local);
            net.engine().schedule_local(id, at_local, [&net, id, &params] {
                Frame f;
                f.kind = FrameKind::data;
                f.payload_len = params.payload_bytes;
                net.mac(id).send_broadcast(f);
            });
        }
    }

    // Local clocks drift by at most a few hundred ppm; a fixed pad covers
    // the conversion back to global time plus the final airtime.
    net.engine().run_until(last_local * (1.0 + 1e-3) + 5.0);
    fold_mac_counters(metrics, net);
    return metrics;
}

}  // namespace uwsim
