#pragma once

#include <cmath>
#include <cstdint>

namespace uwsim {

/// Purpose tag baked into a stream key so that instrumentation added to one
/// subsystem never shifts the draws of another.
enum class RngPurpose : std::uint64_t {
    clock = 1,
    fading = 2,
    decision = 3,
    mac = 4,
    trickle = 5,
    app = 6,
    scenario = 7,
};

/// Counter-based pseudorandom stream (splitmix64) keyed by
/// (master seed, trial, node, purpose).
///
/// Identical keys reproduce identical sequences on any platform; distinct
/// keys give statistically independent streams, so per-node draws never
/// perturb each other.
class RngStream {
  public:
    RngStream() : state_(mix64(0)) {}

    RngStream(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t node,
              RngPurpose purpose) {
        state_ = mix64(master_seed + kGamma);
        state_ = mix64(state_ ^ mix64(trial + kGamma));
        state_ = mix64(state_ ^ mix64(node + kGamma));
        state_ = mix64(state_ ^ mix64(static_cast<std::uint64_t>(purpose) + kGamma));
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix64(state_);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        const int span = hi - lo + 1;
        int v = lo + static_cast<int>(uniform() * span);
        return v > hi ? hi : v;
    }

    /// Box-Muller draw from N(mu, sigma^2). Consumes two uniforms per call.
    double normal(double mu, double sigma) {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mu + sigma * r * std::cos(2.0 * kPi * u2);
    }

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace uwsim
