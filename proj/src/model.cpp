#include "tandemq/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "tandemq/errors.hpp"

namespace tandemq {

Rates::Rates(double lambda, std::vector<double> mu)
    : raw_lambda_(lambda), raw_mu_(std::move(mu)), raw_total_(0.0), lambda_(0.0) {
    if (raw_mu_.size() != 2 && raw_mu_.size() != 3) {
        throw DomainError("tandem network needs 2 or 3 service rates, got " +
                          std::to_string(raw_mu_.size()));
    }
    if (!(raw_lambda_ > 0.0) || !std::isfinite(raw_lambda_)) {
        throw DomainError("arrival rate must be positive and finite");
    }
    for (double m : raw_mu_) {
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw DomainError("service rates must be positive and finite");
        }
    }
    raw_total_ = std::accumulate(raw_mu_.begin(), raw_mu_.end(), raw_lambda_);
    lambda_ = raw_lambda_ / raw_total_;
    mu_.reserve(raw_mu_.size());
    for (double m : raw_mu_) mu_.push_back(m / raw_total_);
}

Rates Rates::from_json(const nlohmann::json& j) {
    if (!j.contains("lambda") || !j.contains("mu")) {
        throw DomainError(R"(rates config needs "lambda" and "mu")");
    }
    return Rates(j.at("lambda").get<double>(), j.at("mu").get<std::vector<double>>());
}

nlohmann::json Rates::to_json() const {
    return {{"lambda", raw_lambda_}, {"mu", raw_mu_}};
}

bool Rates::stable() const noexcept {
    for (double m : mu_) {
        if (!(lambda_ < m)) return false;
    }
    return true;
}

void Rates::require_stable() const {
    if (!stable()) throw UnstableRates("unstable rates (lambda >= some mu_i): " + describe());
}

bool Rates::nearly_equal(int i, int j) const {
    const double a = mu(i);
    const double b = mu(j);
    return std::abs(a - b) / (a + b) < kEqualRateTolerance;
}

std::string Rates::describe() const {
    std::ostringstream os;
    os << "lambda=" << lambda_;
    for (int i = 1; i <= dim(); ++i) os << " mu" << i << "=" << mu(i);
    return os.str();
}

LatticePoint::LatticePoint(std::initializer_list<std::int64_t> coords)
    : dim_(static_cast<int>(coords.size())) {
    if (dim_ < 1 || dim_ > 3) throw DomainError("lattice points have 1 to 3 coordinates");
    std::size_t i = 0;
    for (auto v : coords) c_[i++] = v;
}

LatticePoint LatticePoint::zero(int dim) {
    LatticePoint p;
    if (dim < 1 || dim > 3) throw DomainError("lattice points have 1 to 3 coordinates");
    p.dim_ = dim;
    return p;
}

std::int64_t LatticePoint::sum() const noexcept {
    std::int64_t s = 0;
    for (int i = 0; i < dim_; ++i) s += c_[static_cast<std::size_t>(i)];
    return s;
}

std::int64_t LatticePoint::excess() const noexcept {
    std::int64_t e = c_[0];
    for (int i = 1; i < dim_; ++i) e -= c_[static_cast<std::size_t>(i)];
    return e;
}

LatticePoint LatticePoint::operator+(const LatticePoint& o) const {
    if (o.dim_ != dim_) throw DomainError("dimension mismatch in lattice addition");
    LatticePoint r = *this;
    for (int i = 0; i < dim_; ++i) r[i] += o[i];
    return r;
}

bool LatticePoint::operator==(const LatticePoint& o) const noexcept {
    if (dim_ != o.dim_) return false;
    for (int i = 0; i < dim_; ++i) {
        if (c_[static_cast<std::size_t>(i)] != o.c_[static_cast<std::size_t>(i)]) return false;
    }
    return true;
}

std::string LatticePoint::str() const {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < dim_; ++i) os << (i ? "," : "") << c_[static_cast<std::size_t>(i)];
    os << ')';
    return os.str();
}

std::vector<Step> transition_steps(const Rates& r, WalkKind kind) {
    const double lam = r.lambda();
    if (r.dim() == 2) {
        if (kind == WalkKind::ConstrainedX) {
            return {{{1, 0}, lam}, {{-1, 1}, r.mu(1)}, {{0, -1}, r.mu(2)}};
        }
        return {{{-1, 0}, lam}, {{1, 1}, r.mu(1)}, {{0, -1}, r.mu(2)}};
    }
    if (kind == WalkKind::ConstrainedX) {
        return {{{1, 0, 0}, lam},
                {{-1, 1, 0}, r.mu(1)},
                {{0, -1, 1}, r.mu(2)},
                {{0, 0, -1}, r.mu(3)}};
    }
    return {{{-1, 0, 0}, lam},
            {{1, 1, 0}, r.mu(1)},
            {{0, -1, 1}, r.mu(2)},
            {{0, 0, -1}, r.mu(3)}};
}

bool in_domain(WalkKind kind, const LatticePoint& p) {
    const int first = kind == WalkKind::ConstrainedX ? 0 : 1;
    for (int i = first; i < p.dim(); ++i) {
        if (p[i] < 0) return false;
    }
    return true;
}

LatticePoint constrained_step(WalkKind kind, const LatticePoint& y, const LatticePoint& v) {
    LatticePoint next = y + v;
    return in_domain(kind, next) ? next : y;
}

LatticePoint transform_tn(std::int64_t n, const LatticePoint& x) {
    LatticePoint y = x;
    y[0] = n - x[0];
    return y;
}

Membership boundary_membership(std::int64_t n, const LatticePoint& p) {
    const auto s = p.sum();
    if (s > n) return Membership::OutOfDomain;
    if (s == n) return Membership::ExitBoundary;
    if (s == 0) return Membership::Origin;
    return Membership::Interior;
}

const char* to_string(Membership m) {
    switch (m) {
        case Membership::Interior: return "interior";
        case Membership::ExitBoundary: return "exit-boundary";
        case Membership::Origin: return "origin";
        case Membership::OutOfDomain: return "out-of-domain";
    }
    return "?";
}

const char* to_string(WalkKind k) {
    return k == WalkKind::ConstrainedX ? "constrained-x" : "limit-y";
}

}  // namespace tandemq
