#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "uwsim/rng.hpp"

namespace uwsim {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Loss grows linearly with distance: L(d) = l_d0 + slope_per_m * d.
/// l_d0 is the fitted offset (the regression intercept), slope_per_m the
/// fitted dB-per-meter coefficient.
struct LinearPathLoss {
    double l_d0 = 0.0;      // dB
    double slope_per_m = 0.0;  // dB/m
    double d0 = 1.0;        // m, reference distance used by the fit
};

/// Conventional log-distance law: L(d) = l_d0 + eta * 10 * log10(d / d0).
struct FreeSpacePathLoss {
    double l_d0 = 0.0;  // dB
    double eta = 2.0;   // path-loss exponent
    double d0 = 1.0;    // m
};

using PathLossModel = std::variant<LinearPathLoss, FreeSpacePathLoss>;

struct FadingModel {
    enum class Kind { none, gaussian };
    Kind kind = Kind::none;
    double sigma_db = 0.0;
};

/// Distance/loss pairs from a measurement campaign.
struct MeasurementSet {
    std::vector<double> distances_m;
    std::vector<double> losses_db;

    /// Throws std::invalid_argument unless lengths match (>= 2) and
    /// distances are strictly positive and strictly increasing.
    void validate() const;
};

/// Exact least-squares minimizer of ||A x - losses||^2 with A = [regressors, 1].
/// Returns (coefficient, offset). Throws std::invalid_argument on a length
/// mismatch or fewer than two samples, std::runtime_error when the
/// regressors are all identical (singular normal equations).
std::pair<double, double> fit_affine(std::span<const double> regressors,
                                     std::span<const double> losses);

/// Regresses loss on d/d0; the reported slope is per meter (coefficient/d0).
LinearPathLoss fit_linear_model(const MeasurementSet& meas, double d0);

/// Same regression with the scaled log of the distance, 10*log10(d/d0).
FreeSpacePathLoss fit_freespace_model(const MeasurementSet& meas, double d0);

double path_loss_db(const LinearPathLoss& model, double d);
double path_loss_db(const FreeSpacePathLoss& model, double d);
double path_loss_db(const PathLossModel& model, double d);

double residual_sum_squares(const LinearPathLoss& model, const MeasurementSet& meas);
double residual_sum_squares(const FreeSpacePathLoss& model, const MeasurementSet& meas);

/// One independent fade sample in dB; exactly 0 for Kind::none or sigma 0.
double sample_fading(const FadingModel& model, RngStream& rng);

/// Sample mean and unbiased (n-1) standard deviation of a fading trace.
/// Throws std::invalid_argument for fewer than two samples.
std::pair<double, double> estimate_fading_params(std::span<const double> trace_db);

/// Link budget: tx - loss + fading (a positive fade raises received power).
inline double rx_power_dbm(double tx_dbm, double loss_db, double fading_db) {
    return tx_dbm - loss_db + fading_db;
}

/// Two-column CSV `distance_m,loss_db`; `#` comments and an optional header
/// line are ignored. Throws std::runtime_error on unreadable input.
MeasurementSet load_measurements_csv(const std::string& path);

/// One dB value per line, same comment/header rules.
std::vector<double> load_fading_trace(const std::string& path);

/// Built-in 46 kHz carrier parameters fitted from the measurement campaign.
inline LinearPathLoss paper_linear_model() { return LinearPathLoss{47.40, 10.45, 2.0}; }
inline FadingModel paper_fading_model() {
    return FadingModel{FadingModel::Kind::gaussian, std::sqrt(0.56)};
}

}  // namespace uwsim
