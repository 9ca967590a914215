#pragma once

// Exact overflow probabilities p_n(x) = P_x(tau_n < tau_0) on the simplex A_n
// and finite-horizon oracles P_y(tau <= K) for the limit walk.

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include <json.hpp>

#include "tandemq/model.hpp"
#include "tandemq/numeric.hpp"

namespace tandemq {

/// Values on A_n = {x in Z_+^2 : x1 + x2 <= n}, stored row by row in x1.
template <class Real>
class BasicGridField {
public:
    explicit BasicGridField(std::int64_t n);

    std::int64_t n() const noexcept { return n_; }
    std::size_t size() const noexcept { return values_.size(); }

    Real& at(std::int64_t x1, std::int64_t x2) { return values_[index(x1, x2)]; }
    const Real& at(std::int64_t x1, std::int64_t x2) const { return values_[index(x1, x2)]; }
    const Real& operator()(const LatticePoint& x) const { return at(x[0], x[1]); }

    bool contains(std::int64_t x1, std::int64_t x2) const noexcept {
        return x1 >= 0 && x2 >= 0 && x1 + x2 <= n_;
    }

    /// Gauss-Seidel sweeps used and the final max relative update.
    std::size_t sweeps = 0;
    double last_update = 0.0;

private:
    std::size_t index(std::int64_t x1, std::int64_t x2) const;

    std::int64_t n_;
    std::vector<Real> values_;
};

using GridField = BasicGridField<double>;

enum class SweepOrder { DecreasingPopulation, IncreasingPopulation };

struct SolveOptions {
    double tol = 1e-12;
    std::size_t max_sweeps = 1'000'000;
    SweepOrder order = SweepOrder::DecreasingPopulation;
};

/// Gauss-Seidel for V = E_x[V(X_1)] on the interior of A_n with V = 1 on
/// x1 + x2 = n and V(0) = 0. Frozen steps are eliminated locally each update.
/// Stops once the max relative update over a sweep is below opts.tol;
/// throws NotConverged after opts.max_sweeps.
template <class Real>
BasicGridField<Real> solve_pn_as(const Rates& r, std::int64_t n, const SolveOptions& opts = {});

GridField solve_pn(const Rates& r, std::int64_t n, const SolveOptions& opts = {});

/// Dense LU solve of the same system; cross-check oracle for n <= 40.
GridField solve_pn_direct(const Rates& r, std::int64_t n);

/// Max over interior states of |V - E[V(X_1)]| / V.
double fixed_point_residual(const Rates& r, const GridField& field);

void write_field_csv(std::ostream& os, const GridField& field);
nlohmann::json field_to_json(const GridField& field);

/// P_y(tau <= K) for the limit walk (2d or 3d), by K backward steps over the
/// box of states reachable in K steps.
double horizon_dp(const Rates& r, const LatticePoint& y, int horizon);

/// P_y(tau <= K) for each K in the list, from a single recursion.
std::vector<double> horizon_dp_sequence(const Rates& r, const LatticePoint& y,
                                        std::span<const int> horizons);

struct ConvergenceRow {
    std::int64_t n;
    double p_exact;  // p_n(T_n(y))
    double w_star;   // W*(y)
    double gap;      // |p_exact - w_star|, computed before rounding to double
};

/// |p_n(T_n(y)) - W*(y)| for each n; computed in Quad so gaps far below
/// double resolution stay meaningful.
std::vector<ConvergenceRow> convergence_to_limit(const Rates& r, const LatticePoint& y,
                                                 std::span<const std::int64_t> ns);

extern template class BasicGridField<double>;
extern template class BasicGridField<Quad>;
extern template BasicGridField<double> solve_pn_as<double>(const Rates&, std::int64_t, const SolveOptions&);
extern template BasicGridField<Quad> solve_pn_as<Quad>(const Rates&, std::int64_t, const SolveOptions&);

}  // namespace tandemq
