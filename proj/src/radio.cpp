#include "uwsim/radio.hpp"

#include <algorithm>
#include <cmath>

namespace uwsim {

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double snr_db(double rx_dbm, double noise_floor_dbm, double interference_mw) {
    const double noise_mw = std::pow(10.0, noise_floor_dbm / 10.0) + interference_mw;
    return rx_dbm - 10.0 * std::log10(noise_mw);
}

double fsk_ber(double snr_db, const RadioParams& params) {
    const double ebn0 = std::pow(10.0, snr_db / 10.0) * (params.noise_bw_hz / params.data_rate_bps);
    double p;
    if (params.receiver == ReceiverType::coherent) {
        p = q_function(std::sqrt(ebn0));
    } else {
        p = 0.5 * std::exp(-0.5 * ebn0);
    }
    return std::clamp(p, 0.0, 0.5);
}

double coded_ber(double p, const CodeSpec& code) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("coded_ber: p outside [0, 1]");
    const double bound =
        code.b_dfree * std::pow(2.0 * std::sqrt(p * (1.0 - p)), static_cast<double>(code.d_free));
    return std::min(p, bound);
}

double frame_success_probability(double ber, long total_bits) {
    if (!(ber >= 0.0 && ber <= 1.0)) throw std::domain_error("frame_success: ber outside [0, 1]");
    if (total_bits < 1) throw std::domain_error("frame_success: need at least one bit");
    if (ber >= 1.0) return 0.0;
    return std::exp(static_cast<double>(total_bits) * std::log1p(-ber));
}

}  // namespace uwsim
