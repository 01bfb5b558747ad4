#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "uwsim/rng.hpp"

namespace uwsim {

using SimTime = double;  // virtual seconds
using NodeId = int;

inline constexpr NodeId kBroadcastAddr = -1;
inline constexpr NodeId kNoNode = -2;

/// Per-node local clock: an affine function of global time.
/// local = origin_offset + (1 + drift_ppm * 1e-6) * global
struct NodeClock {
    double drift_ppm = 0.0;
    double origin_offset = 0.0;

    SimTime local_from_global(SimTime global) const {
        return origin_offset + (1.0 + drift_ppm * 1e-6) * global;
    }
    SimTime global_from_local(SimTime local) const {
        return (local - origin_offset) / (1.0 + drift_ppm * 1e-6);
    }
};

struct EventId {
    std::uint64_t value = 0;
};

/// Deterministic single-threaded discrete-event core.
///
/// Events with equal fire time dispatch in insertion order, so a run is a
/// pure function of (configuration, seeds). Handlers may schedule and
/// cancel events re-entrantly.
class Engine {
  public:
    EventId schedule(SimTime fire_time, std::function<void()> handler);
    void cancel(EventId id);

    /// Dispatches every event with fire_time <= t_end, then advances the
    /// clock to t_end. Returns the number of events dispatched.
    std::size_t run_until(SimTime t_end);

    SimTime now() const { return now_; }
    std::size_t dispatched_count() const { return dispatched_; }
    bool pending(EventId id) const { return handlers_.count(id.value) != 0; }

    void set_clock(NodeId node, NodeClock clock);
    const NodeClock& clock(NodeId node) const;
    SimTime local_time(NodeId node) const;
    /// Schedules at a node-local timestamp (converted to global time).
    EventId schedule_local(NodeId node, SimTime local_time, std::function<void()> handler);

    static constexpr double kMaxDriftPpm = 1000.0;

  private:
    struct Pending {
        SimTime t;
        std::uint64_t seq;  // insertion order, breaks fire-time ties
    };
    struct Later {
        bool operator()(const Pending& a, const Pending& b) const {
            if (a.t != b.t) return a.t > b.t;
            return a.seq > b.seq;
        }
    };

    SimTime now_ = 0.0;
    std::uint64_t next_seq_ = 1;
    std::size_t dispatched_ = 0;
    std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
    std::unordered_map<std::uint64_t, std::function<void()>> handlers_;
    std::vector<std::optional<NodeClock>> clocks_;
};

}  // namespace uwsim
