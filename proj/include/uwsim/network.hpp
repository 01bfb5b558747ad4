#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "uwsim/channel.hpp"
#include "uwsim/engine.hpp"
#include "uwsim/mac.hpp"
#include "uwsim/medium.hpp"
#include "uwsim/routing_ctp.hpp"

namespace uwsim {

struct NetConfig {
    PathLossModel channel = paper_linear_model();
    FadingModel fading = paper_fading_model();
    RadioParams radio = paper_radio();
    MacConfig mac;
    CtpConfig ctp;
    double drift_max_ppm = 40.0;  // per-node drift drawn uniformly in +-max
    bool with_routing = false;
    NodeId sink = 0;
};

/// One trial's worth of simulation state: engine, shared medium, and a MAC
/// (plus optionally a CTP router) per node. All randomness is keyed by
/// (master seed, trial, node, purpose), so a trial is fully reproducible
/// and trials are mutually independent.
class Network {
  public:
    Network(NetConfig config, std::vector<Position> positions, std::uint64_t master_seed,
            std::uint64_t trial);

    Engine& engine() { return engine_; }
    Medium& medium() { return *medium_; }
    Mac& mac(NodeId node) { return *macs_[node]; }
    CtpRouter& router(NodeId node) { return *routers_[node]; }
    bool has_router(NodeId node) const { return node < (NodeId)routers_.size() && routers_[node]; }
    NodeId node_count() const { return static_cast<NodeId>(macs_.size()); }
    const NetConfig& config() const { return config_; }

    /// Starts every router's Trickle timer with a small per-node jitter.
    void start_routing(double max_jitter_s = 1.0);

    /// Application-layer delivery (sink arrivals, diffusion arrivals, raw
    /// broadcast/unicast app traffic).
    std::function<void(NodeId self, const Frame&)> on_app_deliver;
    /// Raw reception outcome per (frame, receiver); fires for every arrival.
    std::function<void(NodeId rx, const Frame&, RxOutcome, double rx_dbm)> on_rx_outcome;
    /// MAC event log sink (shared by every node).
    MacLogFn log;

    RngStream app_rng(NodeId node) const;

  private:
    NetConfig config_;
    std::uint64_t master_seed_;
    std::uint64_t trial_;
    Engine engine_;
    std::unique_ptr<Medium> medium_;
    std::vector<std::unique_ptr<Mac>> macs_;
    std::vector<std::unique_ptr<CtpRouter>> routers_;
};

}  // namespace uwsim
