#pragma once

// Characteristic rational functions of the 2d limit walk Y and their
// conjugate-root structure.
//
//   p(beta, alpha)  = lambda/beta + mu1*alpha + mu2*beta/alpha
//   p2(beta, alpha) = lambda/beta + mu1*alpha + mu2
//
// H = {p = 1}; every (beta, alpha) on H gives a log-linear function
// beta^{y1-y2} alpha^{y2} that is harmonic for Y away from the y2 = 0 axis.
// Root solving works on the polynomial obtained by multiplying p = 1 by alpha
// (or by alpha*beta for the real section).

#include <complex>
#include <vector>

#include "tandemq/model.hpp"

namespace tandemq {

using cplx = std::complex<double>;

struct SurfacePoint {
    cplx beta;
    cplx alpha;
};

/// Two points of H that share beta; alpha1 is the larger-magnitude root.
struct ConjugatePair {
    cplx beta;
    cplx alpha1;
    cplx alpha2;
};

inline constexpr double kSurfaceTolerance = 1e-12;

cplx eval_p(const Rates& r, cplx beta, cplx alpha);
cplx eval_p2(const Rates& r, cplx beta, cplx alpha);

bool on_h(const Rates& r, const SurfacePoint& pt, double tol = kSurfaceTolerance);
bool on_h2(const Rates& r, const SurfacePoint& pt, double tol = kSurfaceTolerance);

/// (lambda/beta - 1)^2 - 4 mu1 mu2 beta.
cplx discriminant(const Rates& r, cplx beta);

/// Roots of mu1 a^2 + (lambda/beta - 1) a + mu2 beta = 0.
/// Throws DegenerateDiscriminant when |Delta| < 1e-12 (1 + |lambda/beta - 1|^2).
ConjugatePair solve_alpha(const Rates& r, cplx beta);

/// The other root sharing beta: mu2 beta / (mu1 alpha).
cplx conjugate_of(const Rates& r, cplx beta, cplx alpha);

/// H intersected with H2: (0,0), (1,1), (rho1,rho1).
std::vector<SurfacePoint> h_intersection(const Rates& r);

/// H_a(q) = -log( sum_{i not in a} p(v_i) e^{-<v_i,q>} + sum_{i in a} p(v_i) )
/// over the X increments v0=(1,0), v1=(-1,1), v2=(0,-1). Frozen boundary i
/// removes the exponential weight of v_i.
struct FrozenBoundaries {
    bool first = false;
    bool second = false;
};
double hamiltonian(const Rates& r, double q1, double q2, FrozenBoundaries frozen = {});

struct RealSectionPoint {
    double alpha;
    double beta;
};

/// Real points of H over a grid of alpha > 0: solves
/// mu2 b^2 + (mu1 a^2 - a) b + lambda a = 0 per grid value. Roots for each alpha
/// are emitted in increasing beta; grid order is preserved.
std::vector<RealSectionPoint> real_section(const Rates& r, const std::vector<double>& alpha_grid);

}  // namespace tandemq
