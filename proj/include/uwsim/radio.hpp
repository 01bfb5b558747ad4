#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uwsim/engine.hpp"

namespace uwsim {

enum class ReceiverType { noncoherent, coherent };
enum class CodingType { none, conv_3_1_2 };

/// Convolutional-code descriptor for the coded-BER union bound.
struct CodeSpec {
    int d_free = 1;
    int b_dfree = 1;
};

/// The (3,1,2) code, G(D) = [1+D, 1+D^2, 1+D+D^2].
inline CodeSpec conv_3_1_2_code() { return CodeSpec{7, 1}; }

struct RadioParams {
    double data_rate_bps = 3000.0;
    int bits_per_symbol = 1;
    double signal_bw_hz = 12000.0;
    double noise_bw_hz = 12000.0;
    double noise_floor_dbm = -108.0;
    double sensitivity_dbm = -101.0;
    double tx_power_dbm = 30.0;
    double max_tx_power_dbm = 30.0;
    ReceiverType receiver = ReceiverType::coherent;
    CodingType coding = CodingType::conv_3_1_2;

    void validate() const {
        if (!(data_rate_bps > 0.0)) throw std::invalid_argument("radio: data rate must be positive");
        if (!(noise_bw_hz > 0.0)) throw std::invalid_argument("radio: noise bandwidth must be positive");
        if (!(sensitivity_dbm >= noise_floor_dbm)) {
            throw std::invalid_argument("radio: sensitivity below the noise floor");
        }
        if (tx_power_dbm > max_tx_power_dbm) {
            throw std::invalid_argument("radio: tx power exceeds the configured ceiling");
        }
    }
};

/// The FSK set used throughout: 3 kbps, 12 kHz bandwidths, -108 dBm floor,
/// -101 dBm sensitivity.
inline RadioParams paper_radio(double tx_power_dbm = 30.0) {
    RadioParams p;
    p.tx_power_dbm = tx_power_dbm;
    return p;
}

/// SNR with interference folded into the noise power:
/// rx - 10*log10(10^(floor/10) + interference_mw).
double snr_db(double rx_dbm, double noise_floor_dbm, double interference_mw);

/// Binary-FSK bit error rate. Eb/N0 = snr_linear * noise_bw / data_rate;
/// noncoherent p = exp(-Eb/N0 / 2) / 2, coherent p = Q(sqrt(Eb/N0)).
/// Result clamped to [0, 1/2].
double fsk_ber(double snr_db, const RadioParams& params);

/// Coded-BER union bound B_dfree * (2*sqrt(p(1-p)))^dfree, clamped so that
/// coding never looks worse than the uncoded channel.
double coded_ber(double p, const CodeSpec& code);

/// (1 - ber)^total_bits under i.i.d. bit errors.
double frame_success_probability(double ber, long total_bits);

/// Standard normal tail Q(x).
double q_function(double x);

enum class FrameKind { data, ack, beacon };

/// Collection/diffusion header carried by routed data frames. `hops` is
/// simulation-side bookkeeping (per-packet trace), not on-air bytes.
struct RoutingHeader {
    NodeId origin = kNoNode;
    std::uint32_t origin_seqno = 0;
    double path_etx = 0.0;
    NodeId hop_parent = kNoNode;
    std::optional<NodeId> dest_neighbor;
    SimTime origin_time = 0.0;
    std::vector<NodeId> hops;
};

/// The on-air unit. Airtime is 8*(payload+header)/data_rate.
struct Frame {
    FrameKind kind = FrameKind::data;
    NodeId origin = kNoNode;    // transmitting node of this hop
    NodeId mac_dest = kBroadcastAddr;
    std::uint32_t seqno = 0;    // per-origin MAC sequence number
    int payload_len = 0;        // bytes
    int header_len = 0;         // bytes
    std::optional<RoutingHeader> routing;

    // beacon fields
    double beacon_path_etx = 0.0;
    bool beacon_has_route = false;
    NodeId beacon_parent = kNoNode;
    std::uint32_t beacon_seqno = 0;

    int total_bytes() const { return payload_len + header_len; }
    long total_bits() const { return 8L * total_bytes(); }
    double airtime_s(double data_rate_bps) const {
        return static_cast<double>(total_bits()) / data_rate_bps;
    }
};

}  // namespace uwsim
