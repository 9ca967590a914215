#pragma once

// Network parameters, lattice points and the constrained step maps of the
// tandem walk X and of its limit Y seen from the exit corner.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

namespace tandemq {

/// Arrival and service weights of a 2- or 3-station tandem network.
///
/// Any positive weights are accepted and normalized by their sum, so the
/// normalized values are the jump probabilities of the embedded chain.
/// Utilizations rho_i = lambda / mu_i do not depend on the normalization.
class Rates {
public:
    Rates(double lambda, std::vector<double> mu);

    static Rates from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    /// Number of stations (2 or 3).
    int dim() const noexcept { return static_cast<int>(mu_.size()); }

    double lambda() const noexcept { return lambda_; }
    /// Normalized service probability of station i, 1-based.
    double mu(int i) const { return mu_.at(static_cast<std::size_t>(i - 1)); }
    const std::vector<double>& mus() const noexcept { return mu_; }
    double rho(int i) const { return lambda_ / mu(i); }

    /// Weights as passed to the constructor, before normalization.
    double raw_lambda() const noexcept { return raw_lambda_; }
    const std::vector<double>& raw_mus() const noexcept { return raw_mu_; }
    double raw_total() const noexcept { return raw_total_; }

    /// lambda < mu_i for every station.
    bool stable() const noexcept;
    /// Throws UnstableRates unless stable().
    void require_stable() const;

    /// |mu_i - mu_j| / (mu_i + mu_j) below the equal-rate tolerance.
    bool nearly_equal(int i, int j) const;
    static constexpr double kEqualRateTolerance = 1e-9;

    std::string describe() const;

private:
    double raw_lambda_;
    std::vector<double> raw_mu_;
    double raw_total_;
    double lambda_;
    std::vector<double> mu_;
};

/// Integer point of Z^2 or Z^3.
class LatticePoint {
public:
    LatticePoint() = default;
    LatticePoint(std::initializer_list<std::int64_t> coords);
    static LatticePoint zero(int dim);

    int dim() const noexcept { return dim_; }
    std::int64_t operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    std::int64_t& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
    std::int64_t sum() const noexcept;
    /// y(1) - y(2) - ... - y(d); the distance from the diagonal dB for Y points.
    std::int64_t excess() const noexcept;

    LatticePoint operator+(const LatticePoint& o) const;
    bool operator==(const LatticePoint& o) const noexcept;

    std::string str() const;

private:
    std::array<std::int64_t, 3> c_{};
    int dim_ = 0;
};

enum class WalkKind {
    ConstrainedX,  // queue lengths, reflected on every axis
    LimitY,        // seen from the exit corner, reflected on axes 2..d only
};

struct Step {
    LatticePoint delta;
    double prob;
};

/// Increments of the walk with their probabilities; station order
/// (arrival first, then service 1..d).
std::vector<Step> transition_steps(const Rates& r, WalkKind kind);

/// Whether p lies in the state space of the walk (ignoring any exit set).
bool in_domain(WalkKind kind, const LatticePoint& p);

/// y + v if that stays in the walk's domain, otherwise y.
LatticePoint constrained_step(WalkKind kind, const LatticePoint& y, const LatticePoint& v);

/// T_n: first coordinate mapped to n - x(1), others copied. An involution.
LatticePoint transform_tn(std::int64_t n, const LatticePoint& x);

enum class Membership { Interior, ExitBoundary, Origin, OutOfDomain };

/// Position of a nonnegative point relative to the simplex A_n.
Membership boundary_membership(std::int64_t n, const LatticePoint& p);

const char* to_string(Membership m);
const char* to_string(WalkKind k);

}  // namespace tandemq
