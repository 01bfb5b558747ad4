#include "uwsim/batch.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace uwsim {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct EventSink {
    std::vector<MacLogRecord>* all = nullptr;
    std::vector<std::string>* context = nullptr;  // parallel point labels
};

/// Runs one parameter point: `trials` seeded repetitions of `one_trial`.
template <typename Fn>
PointSummary run_point(const std::string& label, int trials, Fn&& one_trial) {
    std::vector<TrialMetrics> results;
    results.reserve(trials);
    for (int t = 0; t < trials; ++t) results.push_back(one_trial(static_cast<std::uint64_t>(t)));
    return summarize(label, results);
}

const char* receiver_name(ReceiverType r) {
    return r == ReceiverType::coherent ? "coherent" : "noncoherent";
}
const char* coding_name(CodingType c) { return c == CodingType::conv_3_1_2 ? "conv_3_1_2" : "none"; }

}  // namespace

std::vector<PointSummary> run_scenario_points(const SimConfig& config,
                                              std::vector<MacLogRecord>* events) {
    SimConfig cfg = config;
    cfg.finalize();
    std::vector<PointSummary> points;

    auto trial_trace = [&](std::vector<MacLogRecord>& local) {
        return events ? &local : nullptr;
    };
    auto flush_trace = [&](std::vector<MacLogRecord>& local) {
        if (events) events->insert(events->end(), local.begin(), local.end());
        local.clear();
    };

    if (cfg.scenario == "p2p") {
        std::vector<std::pair<ReceiverType, CodingType>> chains;
        if (cfg.p2p_all_chains) {
            chains = {{ReceiverType::noncoherent, CodingType::none},
                      {ReceiverType::noncoherent, CodingType::conv_3_1_2},
                      {ReceiverType::coherent, CodingType::none},
                      {ReceiverType::coherent, CodingType::conv_3_1_2}};
        } else {
            chains = {{cfg.net.radio.receiver, cfg.net.radio.coding}};
        }
        for (double power : cfg.p2p_tx_powers) {
            for (auto [receiver, coding] : chains) {
                for (double d = cfg.p2p_distance_min; d <= cfg.p2p_distance_max + 1e-9;
                     d += cfg.p2p_distance_step) {
                    NetConfig net = cfg.net;
                    net.radio.tx_power_dbm = power;
                    net.radio.receiver = receiver;
                    net.radio.coding = coding;
                    std::string label = "d=" + fmt(d) + ";tx=" + fmt(power);
                    if (cfg.p2p_all_chains) {
                        label += std::string(";rx=") + receiver_name(receiver) +
                                 ";coding=" + coding_name(coding);
                    }
                    P2pParams p;
                    p.distance_m = d;
                    p.frames = cfg.p2p_frames;
                    p.period_s = cfg.p2p_period_s;
                    p.payload_bytes = cfg.p2p_payload_bytes;
                    std::vector<MacLogRecord> local;
                    points.push_back(run_point(label, cfg.trials, [&](std::uint64_t t) {
                        auto m = run_p2p_trial(p, net, cfg.seed, t, trial_trace(local));
                        return m;
                    }));
                    flush_trace(local);
                }
            }
        }
    } else if (cfg.scenario == "routing-grid") {
        for (double period : cfg.routing_periods_s) {
            RoutingParams p;
            p.grid = cfg.grid;
            p.packet_period_s = period;
            p.packets_per_node = cfg.routing_packets_per_node;
            p.warmup_s = cfg.routing_warmup_s;
            p.drain_s = cfg.routing_drain_s;
            p.payload_bytes = cfg.routing_payload_bytes;
            std::vector<MacLogRecord> local;
            points.push_back(
                run_point("period=" + fmt(period), cfg.trials, [&](std::uint64_t t) {
                    return run_routing_trial(p, cfg.net, cfg.seed, t, trial_trace(local));
                }));
            flush_trace(local);
        }
    } else if (cfg.scenario == "diffusion-unicast") {
        for (double up : cfg.diffusion_unicast_periods_s) {
            DiffusionUnicastParams p;
            p.grid = cfg.grid;
            p.unicast_period_s = up;
            p.contention_period_s = cfg.diffusion_contention_period_s;
            p.iterations = cfg.diffusion_iterations;
            p.warmup_s = cfg.diffusion_warmup_s;
            p.payload_bytes = cfg.diffusion_payload_bytes;
            std::vector<MacLogRecord> local;
            points.push_back(run_point(
                "unicast_period=" + fmt(up) + ";contention=" + fmt(p.contention_period_s),
                cfg.trials, [&](std::uint64_t t) {
                    return run_diffusion_unicast_trial(p, cfg.net, cfg.seed, t, trial_trace(local));
                }));
            flush_trace(local);
        }
    } else {  // diffusion-broadcast
        for (double delta : cfg.broadcast_deltas) {
            BroadcastParams p;
            p.grid = cfg.grid;
            p.payload_bytes = cfg.broadcast_payload_bytes;
            p.schedule.p_packets = cfg.broadcast_packets;
            p.schedule.t_p_s = cfg.broadcast_spacing_s;
            p.schedule.delta = delta;
            p.schedule.use_n_factor = cfg.broadcast_use_n_factor;
            p.schedule.synchronous = cfg.broadcast_synchronous;
            std::string label = "delta=" + fmt(delta);
            if (cfg.broadcast_synchronous) label += ";sync=true";
            std::vector<MacLogRecord> local;
            points.push_back(run_point(label, cfg.trials, [&](std::uint64_t t) {
                return run_broadcast_trial(p, cfg.net, cfg.seed, t, trial_trace(local));
            }));
            flush_trace(local);
        }
    }
    return points;
}

std::string summary_csv(const std::vector<PointSummary>& points, const std::string& scenario) {
    std::string out =
        "scenario,point,trials,sent,delivered,duplicates,success_mean,success_stderr,"
        "latency_p50_s,latency_p95_s,latency_p99_s,drop_queue,fail_retries,lost_noise,"
        "lost_collision,below_sensitivity\n";
    for (const PointSummary& p : points) {
        out += scenario + "," + p.label + "," + std::to_string(p.trials) + "," +
               std::to_string(p.sent) + "," + std::to_string(p.delivered) + "," +
               std::to_string(p.duplicates) + "," + fmt(p.success_mean) + "," +
               fmt(p.success_stderr) + "," + fmt(p.latency_percentile(0.50)) + "," +
               fmt(p.latency_percentile(0.95)) + "," + fmt(p.latency_percentile(0.99)) + "," +
               std::to_string(p.drop_queue) + "," + std::to_string(p.fail_retries) + "," +
               std::to_string(p.lost_noise) + "," + std::to_string(p.lost_collision) + "," +
               std::to_string(p.below_sensitivity) + "\n";
    }
    return out;
}

std::string latency_hist_csv(const std::vector<PointSummary>& points, double bin_width_s) {
    std::string out = "point,bin_lo_s,bin_hi_s,count\n";
    for (const PointSummary& p : points) {
        for (const HistogramBin& bin : histogram(p.pooled_latencies_s, bin_width_s)) {
            out += p.label + "," + fmt(bin.lo) + "," + fmt(bin.hi) + "," +
                   std::to_string(bin.count) + "\n";
        }
    }
    return out;
}

std::string events_csv(const std::vector<MacLogRecord>& records) {
    std::string out = "time,origin,dest,seqno,event\n";
    for (const MacLogRecord& r : records) {
        out += fmt(r.time) + "," + std::to_string(r.origin) + "," + std::to_string(r.dest) + "," +
               std::to_string(r.seqno) + "," + r.event + "\n";
    }
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open `" + path.string() + "` for writing");
    out << content;
    if (!out) throw IoError("short write to `" + path.string() + "`");
}

}  // namespace

void run_batch(const SimConfig& config) {
    SimConfig cfg = config;
    cfg.finalize();

    std::error_code ec;
    std::filesystem::create_directories(cfg.outdir, ec);
    if (ec) throw IoError("cannot create output directory `" + cfg.outdir + "`: " + ec.message());

    std::vector<MacLogRecord> events;
    std::vector<PointSummary> points =
        run_scenario_points(cfg, cfg.events_log ? &events : nullptr);

    const std::filesystem::path dir(cfg.outdir);
    write_file(dir / "effective_config.txt", effective_config(cfg));
    write_file(dir / "summary.csv", summary_csv(points, cfg.scenario));
    write_file(dir / "latency_hist.csv", latency_hist_csv(points, 0.5));
    if (cfg.events_log) write_file(dir / "events.csv", events_csv(events));

    if (cfg.scenario == "routing-grid") {
        // Re-run the first trial of the first period to export the sink log.
        RoutingParams p;
        p.grid = cfg.grid;
        p.packet_period_s = cfg.routing_periods_s.front();
        p.packets_per_node = cfg.routing_packets_per_node;
        p.warmup_s = cfg.routing_warmup_s;
        p.drain_s = cfg.routing_drain_s;
        p.payload_bytes = cfg.routing_payload_bytes;
        std::vector<SinkDeliveryRecord> deliveries;
        run_routing_trial(p, cfg.net, cfg.seed, 0, nullptr, &deliveries);
        std::string csv = "arrival_time,origin,seqno,latency_s,hop_count\n";
        for (const SinkDeliveryRecord& r : deliveries) {
            csv += fmt(r.arrival_time) + "," + std::to_string(r.origin) + "," +
                   std::to_string(r.seqno) + "," + fmt(r.latency_s) + "," +
                   std::to_string(r.hop_count) + "\n";
        }
        write_file(dir / "sink_deliveries.csv", csv);
    }
}

}  // namespace uwsim
