#include "uwsim/mac.hpp"

#include <algorithm>
#include <cassert>

namespace uwsim {

Mac::Mac(Engine& engine, Medium& medium, NodeId self, MacConfig config, RngStream rng, MacLogFn log)
    : engine_(engine), medium_(medium), self_(self), config_(config), rng_(rng), log_(std::move(log)) {}

void Mac::log(const Frame& frame, const char* event) {
    if (log_) log_(MacLogRecord{engine_.now(), frame.origin, frame.mac_dest, frame.seqno, event});
}

Mac::SendResult Mac::send_unicast(NodeId dest, Frame frame) {
    frame.kind = FrameKind::data;
    frame.mac_dest = dest;
    return enqueue(std::move(frame));
}

Mac::SendResult Mac::send_broadcast(Frame frame) {
    frame.mac_dest = kBroadcastAddr;
    return enqueue(std::move(frame));
}

Mac::SendResult Mac::enqueue(Frame frame) {
    ++counters_.submitted;
    frame.origin = self_;
    frame.seqno = next_seqno_++;
    frame.header_len = config_.header_bytes;
    if (static_cast<int>(data_queue_.size()) >= config_.queue_capacity) {
        ++counters_.dropped_queue_full;
        log(frame, "drop-queue");
        return SendResult::queue_full;
    }
    data_queue_.push_back(TxQueueEntry{std::move(frame), 0, engine_.now()});
    pump();
    return SendResult::queued;
}

void Mac::pump() {
    if (medium_.transmitting(self_)) return;

    if (!ack_queue_.empty()) {
        Frame ack = ack_queue_.front();
        ack_queue_.pop_front();
        ack_in_air_ = true;
        const bool ok = medium_.begin_transmission(self_, ack);
        assert(ok);
        (void)ok;
        return;
    }

    if (waiting_for_ack_ || backoff_pending_ || head_in_air_ || ack_in_air_) return;
    if (data_queue_.empty()) return;
    transmit_head();
}

void Mac::transmit_head() {
    TxQueueEntry& head = data_queue_.front();
    head_in_air_ = true;
    log(head.frame, "tx");
    const bool ok = medium_.begin_transmission(self_, head.frame);
    assert(ok);
    (void)ok;
}

void Mac::on_radio_idle() {
    if (ack_in_air_) {
        ack_in_air_ = false;
    } else if (head_in_air_) {
        head_in_air_ = false;
        on_data_airtime_done();
    }
    pump();
}

void Mac::on_data_airtime_done() {
    TxQueueEntry& head = data_queue_.front();
    if (head.frame.mac_dest == kBroadcastAddr) {
        finish_head(true);
        return;
    }
    waiting_for_ack_ = true;
    ack_timer_ = engine_.schedule(engine_.now() + config_.ack_wait_s, [this] { on_ack_timeout(); });
}

void Mac::on_ack_timeout() {
    ack_timer_.reset();
    waiting_for_ack_ = false;
    TxQueueEntry& head = data_queue_.front();
    if (head.retries_used < config_.max_retries) {
        ++head.retries_used;
        backoff_pending_ = true;
        const double backoff = rng_.uniform(0.0, config_.ack_wait_s / 4.0);
        engine_.schedule(engine_.now() + backoff, [this] {
            backoff_pending_ = false;
            pump();
        });
        return;
    }
    finish_head(false);
    pump();
}

void Mac::finish_head(bool success) {
    TxQueueEntry entry = std::move(data_queue_.front());
    data_queue_.pop_front();
    const int attempts = entry.retries_used + 1;
    counters_.max_attempts_seen = std::max(counters_.max_attempts_seen, attempts);
    if (success) {
        ++counters_.completed_ok;
    } else {
        ++counters_.failed_retries;
        log(entry.frame, "fail-retries");
    }
    if (entry.frame.mac_dest != kBroadcastAddr && callbacks_.tx_done) {
        callbacks_.tx_done(entry.frame, success, attempts);
    }
}

void Mac::enqueue_ack(const Frame& data) {
    Frame ack;
    ack.kind = FrameKind::ack;
    ack.origin = self_;
    ack.mac_dest = data.origin;
    ack.seqno = data.seqno;  // echoes the acknowledged frame
    ack.payload_len = 0;
    ack.header_len = config_.ack_bytes;
    ack_queue_.push_back(ack);
    pump();
}

bool Mac::dedup_seen(NodeId origin, std::uint32_t seqno) const {
    auto it = dedup_.find(origin);
    if (it == dedup_.end()) return false;
    return std::find(it->second.begin(), it->second.end(), seqno) != it->second.end();
}

void Mac::dedup_add(NodeId origin, std::uint32_t seqno) {
    auto& window = dedup_[origin];
    window.push_back(seqno);
    while (static_cast<int>(window.size()) > config_.dedup_window) window.pop_front();
}

void Mac::on_decoded(const Frame& frame) {
    if (frame.kind == FrameKind::ack) {
        if (frame.mac_dest != self_) return;
        if (!waiting_for_ack_ || data_queue_.empty()) return;  // stale ack
        const TxQueueEntry& head = data_queue_.front();
        if (head.frame.mac_dest != frame.origin || head.frame.seqno != frame.seqno) return;
        if (ack_timer_) engine_.cancel(*ack_timer_);
        ack_timer_.reset();
        waiting_for_ack_ = false;
        log(frame, "ack");
        finish_head(true);
        pump();
        return;
    }

    if (frame.mac_dest == kBroadcastAddr) {
        ++counters_.delivered_up;
        log(frame, "rx");
        if (callbacks_.deliver) callbacks_.deliver(frame);
        return;
    }
    if (frame.mac_dest != self_) return;  // overheard foreign unicast

    if (dedup_seen(frame.origin, frame.seqno)) {
        enqueue_ack(frame);  // re-ack, never re-deliver
        return;
    }
    const bool accepted = callbacks_.accept ? callbacks_.accept(frame) : true;
    if (!accepted) return;  // no ACK: the sender sees the link as down

    dedup_add(frame.origin, frame.seqno);
    enqueue_ack(frame);
    ++counters_.delivered_up;
    log(frame, "rx");
    if (callbacks_.deliver) callbacks_.deliver(frame);
}

}  // namespace uwsim
