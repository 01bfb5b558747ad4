#include "uwsim/engine.hpp"

#include <cmath>
#include <string>

namespace uwsim {

EventId Engine::schedule(SimTime fire_time, std::function<void()> handler) {
    if (!(fire_time >= now_)) {
        throw std::domain_error("schedule: fire time " + std::to_string(fire_time) +
                                " is in the past (clock " + std::to_string(now_) + ")");
    }
    if (!std::isfinite(fire_time)) {
        throw std::domain_error("schedule: fire time must be finite");
    }
    const std::uint64_t seq = next_seq_++;
    queue_.push(Pending{fire_time, seq});
    handlers_.emplace(seq, std::move(handler));
    return EventId{seq};
}

void Engine::cancel(EventId id) {
    handlers_.erase(id.value);  // stale heap entry is skipped at pop
}

std::size_t Engine::run_until(SimTime t_end) {
    if (!(t_end >= now_)) {
        throw std::domain_error("run_until: target time precedes current clock");
    }
    std::size_t count = 0;
    while (!queue_.empty() && queue_.top().t <= t_end) {
        const Pending next = queue_.top();
        queue_.pop();
        auto it = handlers_.find(next.seq);
        if (it == handlers_.end()) continue;  // cancelled
        std::function<void()> handler = std::move(it->second);
        handlers_.erase(it);
        now_ = next.t;
        handler();
        ++count;
        ++dispatched_;
    }
    now_ = t_end;
    return count;
}

void Engine::set_clock(NodeId node, NodeClock clock) {
    if (node < 0) throw std::out_of_range("set_clock: negative node id");
    if (std::abs(clock.drift_ppm) > kMaxDriftPpm) {
        throw std::invalid_argument("set_clock: |drift| exceeds " +
                                    std::to_string(kMaxDriftPpm) + " ppm");
    }
    if (static_cast<std::size_t>(node) >= clocks_.size()) clocks_.resize(node + 1);
    clocks_[node] = clock;
}

const NodeClock& Engine::clock(NodeId node) const {
    if (node < 0 || static_cast<std::size_t>(node) >= clocks_.size() || !clocks_[node]) {
        throw std::out_of_range("unknown node " + std::to_string(node));
    }
    return *clocks_[node];
}

SimTime Engine::local_time(NodeId node) const { return clock(node).local_from_global(now_); }

EventId Engine::schedule_local(NodeId node, SimTime local_time, std::function<void()> handler) {
    return schedule(clock(node).global_from_local(local_time), std::move(handler));
}

}  // namespace uwsim
