#include "uwsim/channel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uwsim {

void MeasurementSet::validate() const {
    if (distances_m.size() != losses_db.size()) {
        throw std::invalid_argument("measurement set: distance/loss length mismatch");
    }
    if (distances_m.size() < 2) {
        throw std::invalid_argument("measurement set: need at least two samples");
    }
    for (std::size_t i = 0; i < distances_m.size(); ++i) {
        if (!(distances_m[i] > 0.0)) {
            throw std::invalid_argument("measurement set: distances must be positive");
        }
        if (i > 0 && !(distances_m[i] > distances_m[i - 1])) {
            throw std::invalid_argument("measurement set: distances must be strictly increasing");
        }
    }
}

std::pair<double, double> fit_affine(std::span<const double> regressors,
                                     std::span<const double> losses) {
    const std::size_t n = regressors.size();
    if (n != losses.size()) throw std::invalid_argument("fit_affine: length mismatch");
    if (n < 2) throw std::invalid_argument("fit_affine: need at least two samples");

    double mean_b = 0.0, max_abs = 0.0;
    for (double b : regressors) {
        mean_b += b;
        max_abs = std::max(max_abs, std::abs(b));
    }
    mean_b /= static_cast<double>(n);
    double spread = 0.0;
    for (double b : regressors) spread += (b - mean_b) * (b - mean_b);
    if (spread <= n * 1e-24 * std::max(1.0, max_abs * max_abs)) {
        throw std::runtime_error("fit_affine: regressors are (nearly) identical, system singular");
    }

    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd m(n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, 0) = regressors[i];
        a(i, 1) = 1.0;
        m(i) = losses[i];
    }
    // Normal equations x = (A^T A)^-1 A^T m; the 2x2 system is solved exactly.
    const Eigen::Vector2d x = (a.transpose() * a).ldlt().solve(a.transpose() * m);
    return {x(0), x(1)};
}

LinearPathLoss fit_linear_model(const MeasurementSet& meas, double d0) {
    meas.validate();
    if (!(d0 > 0.0)) throw std::invalid_argument("fit_linear_model: d0 must be positive");
    std::vector<double> b(meas.distances_m.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = meas.distances_m[i] / d0;
    auto [coef, offset] = fit_affine(b, meas.losses_db);
    return LinearPathLoss{offset, coef / d0, d0};
}

FreeSpacePathLoss fit_freespace_model(const MeasurementSet& meas, double d0) {
    meas.validate();
    if (!(d0 > 0.0)) throw std::invalid_argument("fit_freespace_model: d0 must be positive");
    std::vector<double> b(meas.distances_m.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = 10.0 * std::log10(meas.distances_m[i] / d0);
    auto [coef, offset] = fit_affine(b, meas.losses_db);
    return FreeSpacePathLoss{offset, coef, d0};
}

double path_loss_db(const LinearPathLoss& model, double d) {
    if (!(d > 0.0)) throw std::domain_error("path_loss_db: distance must be positive");
    return model.l_d0 + model.slope_per_m * d;
}

double path_loss_db(const FreeSpacePathLoss& model, double d) {
    if (!(d > 0.0)) throw std::domain_error("path_loss_db: distance must be positive");
    return model.l_d0 + model.eta * 10.0 * std::log10(d / model.d0);
}

double path_loss_db(const PathLossModel& model, double d) {
    return std::visit([d](const auto& m) { return path_loss_db(m, d); }, model);
}

template <typename Model>
static double rss_impl(const Model& model, const MeasurementSet& meas) {
    meas.validate();
    double rss = 0.0;
    for (std::size_t i = 0; i < meas.distances_m.size(); ++i) {
        const double r = path_loss_db(model, meas.distances_m[i]) - meas.losses_db[i];
        rss += r * r;
    }
    return rss;
}

double residual_sum_squares(const LinearPathLoss& model, const MeasurementSet& meas) {
    return rss_impl(model, meas);
}

double residual_sum_squares(const FreeSpacePathLoss& model, const MeasurementSet& meas) {
    return rss_impl(model, meas);
}

double sample_fading(const FadingModel& model, RngStream& rng) {
    if (model.kind == FadingModel::Kind::none || model.sigma_db == 0.0) return 0.0;
    return rng.normal(0.0, model.sigma_db);
}

std::pair<double, double> estimate_fading_params(std::span<const double> trace_db) {
    const std::size_t n = trace_db.size();
    if (n < 2) throw std::invalid_argument("estimate_fading_params: need at least two samples");
    double mean = 0.0;
    for (double v : trace_db) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : trace_db) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

namespace {

bool parse_fields(const std::string& line, std::vector<double>& out) {
    out.clear();
    std::string cleaned = line;
    if (auto hash = cleaned.find('#'); hash != std::string::npos) cleaned.erase(hash);
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream ss(cleaned);
    std::string tok;
    while (ss >> tok) {
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) return false;
            out.push_back(v);
        } catch (const std::exception&) {
            return false;  // non-numeric: header or junk
        }
    }
    return true;
}

}  // namespace

MeasurementSet load_measurements_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open measurement file: " + path);
    MeasurementSet meas;
    std::string line;
    std::vector<double> fields;
    bool first_content = true;
    while (std::getline(in, line)) {
        if (!parse_fields(line, fields)) {
            if (first_content) {  // header row
                first_content = false;
                continue;
            }
            throw std::runtime_error("malformed measurement line: " + line);
        }
        if (fields.empty()) continue;
        if (fields.size() != 2) {
            throw std::runtime_error("expected `distance_m,loss_db` in: " + path);
        }
        first_content = false;
        meas.distances_m.push_back(fields[0]);
        meas.losses_db.push_back(fields[1]);
    }
    meas.validate();
    return meas;
}

std::vector<double> load_fading_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fading trace: " + path);
    std::vector<double> trace;
    std::string line;
    std::vector<double> fields;
    bool first_content = true;
    while (std::getline(in, line)) {
        if (!parse_fields(line, fields)) {
            if (first_content) {
                first_content = false;
                continue;
            }
            throw std::runtime_error("malformed trace line: " + line);
        }
        if (fields.empty()) continue;
        if (fields.size() != 1) throw std::runtime_error("expected one dB value per line: " + path);
        first_content = false;
        trace.push_back(fields[0]);
    }
    return trace;
}

}  // namespace uwsim
