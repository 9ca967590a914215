#pragma once

// Plain Monte Carlo estimates of P_x(tau_n < tau_0) for X and of
// P_y(tau < infinity) for the limit walk Y.
//
// Every path draws from its own SplitMix64 stream keyed by (seed, path index),
// so results are identical for any number of worker threads.

#include <cstdint>
#include <limits>

#include <json.hpp>

#include "tandemq/model.hpp"

namespace tandemq {

/// SplitMix64 stream for one path. Satisfies UniformRandomBitGenerator.
class PathRng {
public:
    using result_type = std::uint64_t;

    PathRng(std::uint64_t seed, std::uint64_t path_index) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

struct SimConfig {
    Rates rates;
    WalkKind kind = WalkKind::ConstrainedX;
    LatticePoint start;
    std::uint64_t paths = 100'000;
    std::uint64_t seed = 1;
    std::int64_t escape_gap = 40;  // Y only: stop once y1 - y2 - ... reaches it
    std::int64_t buffer_n = 0;     // X only: the exit level x1 + x2 + ... = n
    unsigned workers = 0;          // 0 picks std::thread::hardware_concurrency()
};

struct Estimate {
    double p_hat = 0.0;
    double std_err = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t escapes = 0;
    std::uint64_t paths = 0;
    std::uint64_t seed = 0;
    double bias_bound = 0.0;      // Y only: sup of W* over the escape face
    bool unstable_rates = false;  // simulated anyway; no stationary regime

    double ci95_low() const noexcept { return p_hat - 1.96 * std_err; }
    double ci95_high() const noexcept { return p_hat + 1.96 * std_err; }
    nlohmann::json to_json() const;
};

/// Runs paths of X from cfg.start until x hits the exit level (success) or 0.
Estimate simulate_pn(const SimConfig& cfg);

/// Runs paths of Y until they reach dB (success) or the escape face.
/// The true P_y(tau < inf) lies in [p_hat - 2 se, p_hat + 2 se + bias_bound].
Estimate simulate_y_hit(const SimConfig& cfg);

Estimate simulate(const SimConfig& cfg);

/// Upper bound on P_y(escape face reached before dB, then dB reached later).
double escape_bias_bound(const Rates& r, std::int64_t escape_gap);

}  // namespace tandemq
