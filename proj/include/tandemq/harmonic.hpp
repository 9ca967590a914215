#pragma once

// Log-linear harmonic functions of the limit walk Y and the closed-form
// escape probability W*(y) = P_y(tau < infinity) built from them.

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tandemq/charsurface.hpp"
#include "tandemq/model.hpp"
#include "tandemq/numeric.hpp"

namespace tandemq {

/// coeff * beta^{y(1) - y(2) - ... - y(d)} * prod_i alpha_i^{y(i+1)}
struct LogLinearTerm {
    cplx coeff;
    cplx beta;
    std::vector<cplx> alphas;  // d - 1 entries

    cplx operator()(const LatticePoint& y) const;
};

class LogLinearCombination {
public:
    explicit LogLinearCombination(int dim = 2) : dim_(dim) {}
    LogLinearCombination(int dim, std::vector<LogLinearTerm> terms);

    int dim() const noexcept { return dim_; }
    const std::vector<LogLinearTerm>& terms() const noexcept { return terms_; }
    void add(LogLinearTerm t);

    cplx operator()(const LatticePoint& y) const;
    /// Real part; throws DomainError if the imaginary part exceeds 1e-12 |value|.
    double real_at(const LatticePoint& y) const;

    LogLinearCombination operator+(const LogLinearCombination& o) const;
    LogLinearCombination operator*(cplx s) const;

    nlohmann::json to_json() const;
    static LogLinearCombination from_json(const nlohmann::json& j);

private:
    int dim_;
    std::vector<LogLinearTerm> terms_;
};

/// The single bracket [(beta, alpha), .] with unit coefficient.
LogLinearCombination make_bracket(cplx beta, std::vector<cplx> alphas);

/// C(beta, alpha) = mu2 (1 - beta/alpha).
cplx coeff_c(const Rates& r, cplx beta, cplx alpha);

/// h_beta = C(beta,alpha2)[(beta,alpha1),.] - C(beta,alpha1)[(beta,alpha2),.]
/// with (alpha1, alpha2) from solve_alpha. Y-harmonic whenever Delta(beta) != 0.
LogLinearCombination make_h_beta(const Rates& r, cplx beta);
/// Same construction from an explicit root order.
LogLinearCombination make_h_beta(const Rates& r, const ConjugatePair& pair);

// --- closed forms ---------------------------------------------------------

/// W*(y) for two stations with mu1 != mu2. Requires y1 >= y2 >= 0 and stability.
double w_star_2d(const Rates& r, const LatticePoint& y);

/// Same formula in an arbitrary scalar type (used with Quad).
template <class Real>
Real w_star_2d_as(const Rates& r, const LatticePoint& y);

/// log W*(y) by signed log-sum-exp; usable where W* underflows double.
double log_w_star_2d(const Rates& r, const LatticePoint& y);

/// mu1 == mu2 == mu limit: rho^{y1-y2} + (mu - lambda)/mu rho^{y1} (y1 - y2).
double w_equal_rates(const Rates& r, const LatticePoint& y);

/// Three stations with pairwise distinct service rates; y1 >= y2 + y3.
double w_star_3d(const Rates& r, const LatticePoint& y);

/// W* routed by dimension and the mu1 == mu2 branch.
double w_star(const Rates& r, const LatticePoint& y);

/// W* written as a combination of brackets (3 terms in 2d, 7 in 3d).
LogLinearCombination make_w_star_2d(const Rates& r);
LogLinearCombination make_w_star_3d(const Rates& r);

// --- harmonicity ----------------------------------------------------------

/// Max residual |f(y) - sum_v p(v) f(step(y,v))| per boundary stratum. The
/// stratum key is a bitmask of the constrained coordinates that are zero at y
/// (bit i for coordinate i, 0-based); key 0 is the interior.
struct ResidualReport {
    std::map<unsigned, double> by_stratum;
    std::size_t points_checked = 0;

    double interior() const;
    /// Max over all nonzero strata.
    double boundary() const;
    double max() const;
    bool harmonic(double tol = 1e-12) const { return max() <= tol; }
    nlohmann::json to_json() const;
};

using LatticeFunction = std::function<cplx(const LatticePoint&)>;

ResidualReport residual_check(const Rates& r, WalkKind kind, const LatticeFunction& f,
                              std::span<const LatticePoint> sample);
ResidualReport residual_check(const Rates& r, WalkKind kind, const LogLinearCombination& f,
                              std::span<const LatticePoint> sample);

/// Exhaustive box {0 <= y2 <= 30, y2 <= y1 <= y2 + 60} in 2d;
/// {0 <= y2, y3 <= 20, 0 <= y1 - y2 - y3 <= 40} in 3d.
std::vector<LatticePoint> default_sample_box(int dim);

// --- balayage -------------------------------------------------------------

struct BalayageFit {
    std::vector<cplx> weights;
    double max_boundary_error = 0.0;
};

/// Throws InadmissibleBasisElement unless every term has |beta| < 1 and all
/// |alpha_i| <= 1 (terms with zero coefficient are ignored).
void require_admissible(const LogLinearCombination& f);
bool admissible(const LogLinearCombination& f);

/// h_beta for each beta, each checked for admissibility.
std::vector<LogLinearCombination> h_beta_basis(const Rates& r, std::span<const cplx> betas);

/// Random beta in the unit disk whose conjugate pair satisfies the
/// admissibility conditions; deterministic in seed.
std::vector<cplx> sample_admissible_betas(const Rates& r, std::size_t count, std::uint64_t seed);

/// Points (k, k), k = 0..count-1 on the diagonal dB.
std::vector<LatticePoint> diagonal_samples(std::size_t count);

/// Least-squares weights for sum_i w_i f_i ~ target on the boundary samples.
/// The max boundary deviation bounds the error of the superposition for
/// dB-determined expectations everywhere in B.
BalayageFit balayage_fit(std::span<const LogLinearCombination> basis,
                         std::span<const LatticePoint> samples, std::span<const double> target);

// --- diffusion analog -----------------------------------------------------

/// Hitting probability of the diagonal for the constrained diffusion with
/// drift (2a+b, a-b) and covariance (1/3)[[2,1],[1,2]]; requires a, b > 0, a != b.
double diffusion_w(double a, double b, double x1, double x2);

/// Central finite-difference value of L diffusion_w at x with step h.
double diffusion_generator_fd(double a, double b, double x1, double x2, double h);
/// Central finite-difference d/dx2 of diffusion_w at (x1, 0).
double diffusion_neumann_fd(double a, double b, double x1, double h);

// -------------------------------------------------------------------------

template <class Real>
Real w_star_2d_as(const Rates& r, const LatticePoint& y) {
    if (r.dim() != 2 || y.dim() != 2) throw DomainError("w_star_2d needs two stations");
    r.require_stable();
    if (r.nearly_equal(1, 2)) throw EqualRates("mu1 == mu2: use w_equal_rates");
    if (y[1] < 0 || y[0] < y[1]) throw DomainError("w_star_2d needs y1 >= y2 >= 0, got " + y.str());
    const RatesAs<Real> q(r);
    const Real rho1 = q.rho(1);
    const Real rho2 = q.rho(2);
    const Real c = (q.mu_at(2) - q.lambda) / (q.mu_at(2) - q.mu_at(1));
    const std::int64_t d = y[0] - y[1];
    const Real r2d = ipow(rho2, d);
    // rho2^d + c rho1^{y2} (rho1^d - rho2^d); exactly 1 at d = 0.
    return r2d + c * ipow(rho1, y[1]) * (ipow(rho1, d) - r2d);
}

}  // namespace tandemq
