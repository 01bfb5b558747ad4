#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "uwsim/engine.hpp"
#include "uwsim/medium.hpp"
#include "uwsim/radio.hpp"

namespace uwsim {

struct MacConfig {
    double ack_wait_s = 5120.0 / 3000.0;  // 5120 bits at the configured rate
    int max_retries = 4;
    int queue_capacity = 16;  // data frames, head-of-line included
    int ack_bytes = 5;
    int header_bytes = 9;  // dest, origin, seqno, type, length
    int dedup_window = 8;  // remembered seqnos per origin
};

/// One per-frame log record; `event` uses the fixed vocabulary
/// tx, rx, ack, drop-queue, fail-retries, lost-noise, lost-collision,
/// below-sensitivity.
struct MacLogRecord {
    SimTime time;
    NodeId origin;
    NodeId dest;
    std::uint32_t seqno;
    std::string event;
};

using MacLogFn = std::function<void(const MacLogRecord&)>;

/// Stop-and-wait MAC: FIFO data queue with bounded capacity, acknowledged
/// unicast with timeout/retry and random re-try backoff, fire-and-forget
/// broadcast, and ACKs that always jump ahead of queued data. There is no
/// carrier sensing; a node transmits whenever its own radio is free.
class Mac {
  public:
    enum class SendResult { queued, queue_full };

    struct Callbacks {
        /// Upper-layer admission test for unicast data addressed to this
        /// node. Returning false withholds the ACK (sender keeps retrying).
        std::function<bool(const Frame&)> accept;
        /// Upward delivery (at most once per (origin, seqno) in the window).
        std::function<void(const Frame&)> deliver;
        /// Unicast completion: acked or failed after retries.
        std::function<void(const Frame&, bool success, int attempts)> tx_done;
    };

    struct Counters {
        std::uint64_t submitted = 0;      // frames handed to send_*
        std::uint64_t completed_ok = 0;   // acked unicast + finished broadcast
        std::uint64_t failed_retries = 0;
        std::uint64_t dropped_queue_full = 0;
        std::uint64_t delivered_up = 0;
        int max_attempts_seen = 0;  // per-frame transmission count high-water mark
    };

    Mac(Engine& engine, Medium& medium, NodeId self, MacConfig config, RngStream rng,
        MacLogFn log = nullptr);

    SendResult send_unicast(NodeId dest, Frame frame);
    SendResult send_broadcast(Frame frame);

    /// Wire these to the medium.
    void on_decoded(const Frame& frame);
    void on_radio_idle();

    const Counters& counters() const { return counters_; }
    int queue_len() const { return static_cast<int>(data_queue_.size()); }
    Callbacks& callbacks() { return callbacks_; }
    const MacConfig& config() const { return config_; }

  private:
    struct TxQueueEntry {
        Frame frame;
        int retries_used = 0;
        SimTime enqueue_time = 0.0;
    };

    SendResult enqueue(Frame frame);
    void pump();
    void transmit_head();
    void on_data_airtime_done();
    void on_ack_timeout();
    void finish_head(bool success);
    void enqueue_ack(const Frame& data);
    bool dedup_seen(NodeId origin, std::uint32_t seqno) const;
    void dedup_add(NodeId origin, std::uint32_t seqno);
    void log(const Frame& frame, const char* event);

    Engine& engine_;
    Medium& medium_;
    NodeId self_;
    MacConfig config_;
    RngStream rng_;
    MacLogFn log_;
    Callbacks callbacks_;

    std::deque<Frame> ack_queue_;
    std::deque<TxQueueEntry> data_queue_;
    bool head_in_air_ = false;      // head data frame currently on air
    bool ack_in_air_ = false;       // an ACK currently on air
    bool waiting_for_ack_ = false;  // head transmitted, ack_wait running
    bool backoff_pending_ = false;  // retry backoff timer running
    std::optional<EventId> ack_timer_;
    std::uint32_t next_seqno_ = 0;
    std::map<NodeId, std::deque<std::uint32_t>> dedup_;  // recent per-origin seqnos
    Counters counters_;
};

}  // namespace uwsim
