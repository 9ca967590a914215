#include "tandemq/charsurface.hpp"

#include <cmath>

#include "tandemq/errors.hpp"

namespace tandemq {
namespace {

void require_2d(const Rates& r) {
    if (r.dim() != 2) throw DomainError("characteristic surface is defined for 2 stations");
}

void require_nonzero(cplx z, const char* what) {
    if (z == cplx{0.0, 0.0}) throw DomainError(std::string(what) + " must be nonzero");
}

}  // namespace

cplx eval_p(const Rates& r, cplx beta, cplx alpha) {
    require_2d(r);
    require_nonzero(beta, "beta");
    require_nonzero(alpha, "alpha");
    return r.lambda() / beta + r.mu(1) * alpha + r.mu(2) * beta / alpha;
}

cplx eval_p2(const Rates& r, cplx beta, cplx alpha) {
    require_2d(r);
    require_nonzero(beta, "beta");
    return r.lambda() / beta + r.mu(1) * alpha + r.mu(2);
}

bool on_h(const Rates& r, const SurfacePoint& pt, double tol) {
    return std::abs(eval_p(r, pt.beta, pt.alpha) - 1.0) <= tol;
}

bool on_h2(const Rates& r, const SurfacePoint& pt, double tol) {
    return std::abs(eval_p2(r, pt.beta, pt.alpha) - 1.0) <= tol;
}

cplx discriminant(const Rates& r, cplx beta) {
    require_2d(r);
    require_nonzero(beta, "beta");
    const cplx b = r.lambda() / beta - 1.0;
    return b * b - 4.0 * r.mu(1) * r.mu(2) * beta;
}

ConjugatePair solve_alpha(const Rates& r, cplx beta) {
    require_2d(r);
    require_nonzero(beta, "beta");
    const double a = r.mu(1);
    const cplx b = r.lambda() / beta - 1.0;
    const cplx c = r.mu(2) * beta;
    const cplx disc = b * b - 4.0 * a * c;
    if (std::abs(disc) < 1e-12 * (1.0 + std::norm(b))) throw DegenerateDiscriminant(beta);

    // Larger root first, the smaller from the product c/a; avoids cancellation.
    cplx s = std::sqrt(disc);
    if (std::real(std::conj(b) * s) < 0.0) s = -s;
    const cplx q = -0.5 * (b + s);
    return {beta, q / a, c / q};
}

cplx conjugate_of(const Rates& r, cplx beta, cplx alpha) {
    require_2d(r);
    require_nonzero(beta, "beta");
    require_nonzero(alpha, "alpha");
    return r.mu(2) * beta / (r.mu(1) * alpha);
}

std::vector<SurfacePoint> h_intersection(const Rates& r) {
    require_2d(r);
    r.require_stable();
    const double rho1 = r.rho(1);
    return {{{0.0, 0.0}, {0.0, 0.0}}, {{1.0, 0.0}, {1.0, 0.0}}, {{rho1, 0.0}, {rho1, 0.0}}};
}

double hamiltonian(const Rates& r, double q1, double q2, FrozenBoundaries frozen) {
    require_2d(r);
    // <v,q> for v0=(1,0), v1=(-1,1), v2=(0,-1)
    double sum = r.lambda() * std::exp(-q1);
    sum += frozen.first ? r.mu(1) : r.mu(1) * std::exp(q1 - q2);
    sum += frozen.second ? r.mu(2) : r.mu(2) * std::exp(q2);
    return -std::log(sum);
}

std::vector<RealSectionPoint> real_section(const Rates& r, const std::vector<double>& alpha_grid) {
    require_2d(r);
    std::vector<RealSectionPoint> out;
    out.reserve(2 * alpha_grid.size());
    const double qa = r.mu(2);
    for (double alpha : alpha_grid) {
        if (!(alpha > 0.0)) throw DomainError("real_section grid values must be positive");
        const double qb = r.mu(1) * alpha * alpha - alpha;
        const double qc = r.lambda() * alpha;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc < 0.0) continue;
        if (disc == 0.0) {
            out.push_back({alpha, -qb / (2.0 * qa)});
            continue;
        }
        const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
        double b1 = q / qa;
        double b2 = qc / q;
        if (b1 > b2) std::swap(b1, b2);
        out.push_back({alpha, b1});
        out.push_back({alpha, b2});
    }
    return out;
}

}  // namespace tandemq
