#include "tandemq/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "tandemq/errors.hpp"

namespace tandemq {
namespace {

nlohmann::json cplx_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

cplx json_cplx(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw DomainError("complex values serialize as [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::string stratum_name(unsigned mask) {
    if (mask == 0) return "interior";
    std::string s;
    for (unsigned i = 0; i < 3; ++i) {
        if (mask & (1u << i)) {
            if (!s.empty()) s += "+";
            s += "y" + std::to_string(i + 1) + "=0";
        }
    }
    return s;
}

}  // namespace

cplx LogLinearTerm::operator()(const LatticePoint& y) const {
    if (static_cast<int>(alphas.size()) + 1 != y.dim()) {
        throw DomainError("log-linear term dimension does not match point " + y.str());
    }
    cplx v = coeff * ipow(beta, y.excess());
    for (std::size_t i = 0; i < alphas.size(); ++i) v *= ipow(alphas[i], y[static_cast<int>(i) + 1]);
    return v;
}

LogLinearCombination::LogLinearCombination(int dim, std::vector<LogLinearTerm> terms) : dim_(dim) {
    for (auto& t : terms) add(std::move(t));
}

void LogLinearCombination::add(LogLinearTerm t) {
    if (static_cast<int>(t.alphas.size()) + 1 != dim_) {
        throw DomainError("term needs " + std::to_string(dim_ - 1) + " alphas");
    }
    terms_.push_back(std::move(t));
}

cplx LogLinearCombination::operator()(const LatticePoint& y) const {
    cplx s{0.0, 0.0};
    for (const auto& t : terms_) s += t(y);
    return s;
}

double LogLinearCombination::real_at(const LatticePoint& y) const {
    const cplx v = (*this)(y);
    if (std::abs(v.imag()) > 1e-12 * std::abs(v)) {
        throw DomainError("combination is not real at " + y.str());
    }
    return v.real();
}

LogLinearCombination LogLinearCombination::operator+(const LogLinearCombination& o) const {
    if (o.dim_ != dim_) throw DomainError("dimension mismatch in combination sum");
    LogLinearCombination r = *this;
    for (const auto& t : o.terms_) r.terms_.push_back(t);
    return r;
}

LogLinearCombination LogLinearCombination::operator*(cplx s) const {
    LogLinearCombination r = *this;
    for (auto& t : r.terms_) t.coeff *= s;
    return r;
}

nlohmann::json LogLinearCombination::to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : terms_) {
        nlohmann::json alphas = nlohmann::json::array();
        for (auto a : t.alphas) alphas.push_back(cplx_json(a));
        terms.push_back({{"coeff", cplx_json(t.coeff)}, {"beta", cplx_json(t.beta)}, {"alphas", alphas}});
    }
    return {{"terms", terms}};
}

LogLinearCombination LogLinearCombination::from_json(const nlohmann::json& j) {
    const auto& terms = j.at("terms");
    int dim = 2;
    if (!terms.empty()) dim = static_cast<int>(terms.at(0).at("alphas").size()) + 1;
    LogLinearCombination out(dim);
    for (const auto& t : terms) {
        LogLinearTerm term{json_cplx(t.at("coeff")), json_cplx(t.at("beta")), {}};
        for (const auto& a : t.at("alphas")) term.alphas.push_back(json_cplx(a));
        out.add(std::move(term));
    }
    return out;
}

LogLinearCombination make_bracket(cplx beta, std::vector<cplx> alphas) {
    const int dim = static_cast<int>(alphas.size()) + 1;
    return LogLinearCombination(dim, {{cplx{1.0, 0.0}, beta, std::move(alphas)}});
}

cplx coeff_c(const Rates& r, cplx beta, cplx alpha) {
    if (r.dim() != 2) throw DomainError("C(beta, alpha) is defined for two stations");
    if (alpha == cplx{0.0, 0.0}) throw DomainError("alpha must be nonzero");
    return r.mu(2) * (1.0 - beta / alpha);
}

LogLinearCombination make_h_beta(const Rates& r, const ConjugatePair& pair) {
    return LogLinearCombination(
        2, {{coeff_c(r, pair.beta, pair.alpha2), pair.beta, {pair.alpha1}},
            {-coeff_c(r, pair.beta, pair.alpha1), pair.beta, {pair.alpha2}}});
}

LogLinearCombination make_h_beta(const Rates& r, cplx beta) {
    return make_h_beta(r, solve_alpha(r, beta));
}

double w_star_2d(const Rates& r, const LatticePoint& y) { return w_star_2d_as<double>(r, y); }

double log_w_star_2d(const Rates& r, const LatticePoint& y) {
    if (r.dim() != 2 || y.dim() != 2) throw DomainError("w_star_2d needs two stations");
    r.require_stable();
    if (r.nearly_equal(1, 2)) throw EqualRates("mu1 == mu2: use w_equal_rates");
    if (y[1] < 0 || y[0] < y[1]) throw DomainError("w_star_2d needs y1 >= y2 >= 0");

    const double lr1 = std::log(r.rho(1));
    const double lr2 = std::log(r.rho(2));
    const double c = (r.mu(2) - r.lambda()) / (r.mu(2) - r.mu(1));
    const double lc = std::log(std::abs(c));
    const double sc = c > 0 ? 1.0 : -1.0;
    const auto d = static_cast<double>(y[0] - y[1]);
    const auto y1 = static_cast<double>(y[0]);
    const auto y2 = static_cast<double>(y[1]);

    // rho2^d - c rho1^{y2} rho2^d + c rho1^{y1}
    const std::array<double, 3> logs{d * lr2, lc + y2 * lr1 + d * lr2, lc + y1 * lr1};
    const std::array<double, 3> signs{1.0, -sc, sc};
    const double m = *std::max_element(logs.begin(), logs.end());
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += signs[i] * std::exp(logs[i] - m);
    if (!(s > 0.0)) throw DomainError("log-domain W* lost all precision at " + y.str());
    return m + std::log(s);
}

double w_equal_rates(const Rates& r, const LatticePoint& y) {
    if (r.dim() != 2 || y.dim() != 2) throw DomainError("w_equal_rates needs two stations");
    r.require_stable();
    if (!r.nearly_equal(1, 2)) throw DomainError("w_equal_rates needs mu1 == mu2");
    if (y[1] < 0 || y[0] < y[1]) throw DomainError("w_equal_rates needs y1 >= y2 >= 0");
    const double mu = r.mu(1);
    const double rho = r.lambda() / mu;
    const auto d = y[0] - y[1];
    return ipow(rho, d) + (mu - r.lambda()) / mu * ipow(rho, y[0]) * static_cast<double>(d);
}

namespace {

struct ThreeStationCoefficients {
    double rho1, rho2, rho3, c1, c2, c3;
};

ThreeStationCoefficients three_station(const Rates& r) {
    if (r.dim() != 3) throw DomainError("three-station formula needs three service rates");
    r.require_stable();
    if (r.nearly_equal(1, 2) || r.nearly_equal(1, 3) || r.nearly_equal(2, 3)) {
        throw EqualRates("three-station formula needs pairwise distinct service rates");
    }
    const double lam = r.lambda();
    const double m1 = r.mu(1), m2 = r.mu(2), m3 = r.mu(3);
    return {r.rho(1), r.rho(2), r.rho(3), (m3 - lam) / (m3 - m1), (m2 - lam) / (m2 - m1),
            (m3 - lam) / (m3 - m2)};
}

}  // namespace

double w_star_3d(const Rates& r, const LatticePoint& y) {
    const auto k = three_station(r);
    if (y.dim() != 3) throw DomainError("w_star_3d needs a 3d point");
    if (y[1] < 0 || y[2] < 0 || y.excess() < 0) {
        throw DomainError("w_star_3d needs y2, y3 >= 0 and y1 >= y2 + y3, got " + y.str());
    }
    const auto e = y.excess();
    const double r3e = ipow(k.rho3, e);
    // Grouped so every non-constant term carries a factor rho_i^e - rho3^e.
    return r3e +
           k.c3 * ipow(k.rho2, y[2]) * (1.0 - k.c2 * ipow(k.rho1, y[1])) * (ipow(k.rho2, e) - r3e) +
           k.c1 * k.c2 * ipow(k.rho1, y[1] + y[2]) * (ipow(k.rho1, e) - r3e);
}

double w_star(const Rates& r, const LatticePoint& y) {
    if (r.dim() == 3) return w_star_3d(r, y);
    if (r.nearly_equal(1, 2)) return w_equal_rates(r, y);
    return w_star_2d(r, y);
}

LogLinearCombination make_w_star_2d(const Rates& r) {
    r.require_stable();
    if (r.nearly_equal(1, 2)) throw EqualRates("mu1 == mu2 has no log-linear W*");
    const double rho1 = r.rho(1);
    const double rho2 = r.rho(2);
    const ConjugatePair pair{rho2, 1.0, rho1};
    const cplx c_pair = coeff_c(r, rho2, rho1);
    const cplx c_unit = coeff_c(r, rho2, 1.0);
    return make_h_beta(r, pair) * (1.0 / c_pair) + make_bracket(rho1, {rho1}) * (c_unit / c_pair);
}

LogLinearCombination make_w_star_3d(const Rates& r) {
    const auto k = three_station(r);
    const cplx one{1.0, 0.0};
    return LogLinearCombination(
        3, {
               // h_{rho3}
               {one, k.rho3, {1.0, 1.0}},
               {-k.c3, k.rho3, {1.0, k.rho2}},
               {-k.c1 * k.c2, k.rho3, {k.rho1, k.rho1}},
               {k.c3 * k.c2, k.rho3, {k.rho1, k.rho2}},
               // c3 h_{rho2}
               {k.c3, k.rho2, {1.0, k.rho2}},
               {-k.c3 * k.c2, k.rho2, {k.rho1, k.rho2}},
               // c1 c2 h_{rho1}
               {k.c1 * k.c2, k.rho1, {k.rho1, k.rho1}},
           });
}

double ResidualReport::interior() const {
    auto it = by_stratum.find(0);
    return it == by_stratum.end() ? 0.0 : it->second;
}

double ResidualReport::boundary() const {
    double m = 0.0;
    for (const auto& [mask, v] : by_stratum) {
        if (mask != 0) m = std::max(m, v);
    }
    return m;
}

double ResidualReport::max() const { return std::max(interior(), boundary()); }

nlohmann::json ResidualReport::to_json() const {
    nlohmann::json strata = nlohmann::json::object();
    for (const auto& [mask, v] : by_stratum) strata[stratum_name(mask)] = v;
    return {{"max_interior_residual", interior()},
            {"max_boundary_residual", boundary()},
            {"strata", strata},
            {"points_checked", points_checked}};
}

ResidualReport residual_check(const Rates& r, WalkKind kind, const LatticeFunction& f,
                              std::span<const LatticePoint> sample) {
    const auto steps = transition_steps(r, kind);
    const int first_constrained = kind == WalkKind::ConstrainedX ? 0 : 1;
    ResidualReport rep;
    for (const auto& y : sample) {
        if (y.dim() != r.dim()) throw DomainError("sample point dimension mismatch");
        if (!in_domain(kind, y)) throw DomainError("sample point outside the walk's domain: " + y.str());
        cplx expected{0.0, 0.0};
        for (const auto& s : steps) expected += s.prob * f(constrained_step(kind, y, s.delta));
        const double res = std::abs(f(y) - expected);
        unsigned mask = 0;
        for (int i = first_constrained; i < y.dim(); ++i) {
            if (y[i] == 0) mask |= 1u << static_cast<unsigned>(i);
        }
        auto& slot = rep.by_stratum[mask];
        slot = std::max(slot, res);
        ++rep.points_checked;
    }
    return rep;
}

ResidualReport residual_check(const Rates& r, WalkKind kind, const LogLinearCombination& f,
                              std::span<const LatticePoint> sample) {
    return residual_check(r, kind, LatticeFunction([&f](const LatticePoint& y) { return f(y); }),
                          sample);
}

std::vector<LatticePoint> default_sample_box(int dim) {
    std::vector<LatticePoint> pts;
    if (dim == 2) {
        for (std::int64_t y2 = 0; y2 <= 30; ++y2) {
            for (std::int64_t y1 = y2; y1 <= y2 + 60; ++y1) pts.push_back({y1, y2});
        }
    } else if (dim == 3) {
        for (std::int64_t y2 = 0; y2 <= 20; ++y2) {
            for (std::int64_t y3 = 0; y3 <= 20; ++y3) {
                for (std::int64_t e = 0; e <= 40; ++e) pts.push_back({e + y2 + y3, y2, y3});
            }
        }
    } else {
        throw DomainError("sample boxes exist for 2 or 3 dimensions");
    }
    return pts;
}

bool admissible(const LogLinearCombination& f) {
    try {
        require_admissible(f);
    } catch (const InadmissibleBasisElement&) {
        return false;
    }
    return true;
}

void require_admissible(const LogLinearCombination& f) {
    constexpr double kAlphaSlack = 1e-12;
    for (const auto& t : f.terms()) {
        if (t.coeff == cplx{0.0, 0.0}) continue;
        if (!(std::abs(t.beta) < 1.0)) throw InadmissibleBasisElement(t.beta, "|beta| >= 1");
        for (auto a : t.alphas) {
            if (std::abs(a) > 1.0 + kAlphaSlack) throw InadmissibleBasisElement(t.beta, "|alpha| > 1");
        }
    }
}

std::vector<LogLinearCombination> h_beta_basis(const Rates& r, std::span<const cplx> betas) {
    std::vector<LogLinearCombination> basis;
    basis.reserve(betas.size());
    for (auto b : betas) {
        if (!(std::abs(b) < 1.0)) throw InadmissibleBasisElement(b, "|beta| >= 1");
        auto h = make_h_beta(r, b);
        require_admissible(h);
        basis.push_back(std::move(h));
    }
    return basis;
}

std::vector<cplx> sample_admissible_betas(const Rates& r, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<cplx> out;
    out.reserve(count);
    std::size_t tries = 0;
    while (out.size() < count) {
        if (++tries > 1000 * (count + 10)) throw DomainError("admissible beta region looks empty");
        const cplx b{unit(gen), unit(gen)};
        if (!(std::abs(b) < 1.0) || b == cplx{0.0, 0.0}) continue;
        try {
            if (admissible(make_h_beta(r, b))) out.push_back(b);
        } catch (const DegenerateDiscriminant&) {
        }
    }
    return out;
}

std::vector<LatticePoint> diagonal_samples(std::size_t count) {
    std::vector<LatticePoint> pts;
    pts.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto v = static_cast<std::int64_t>(k);
        pts.push_back({v, v});
    }
    return pts;
}

BalayageFit balayage_fit(std::span<const LogLinearCombination> basis,
                         std::span<const LatticePoint> samples, std::span<const double> target) {
    if (basis.empty()) throw RankDeficientBasis("empty basis");
    if (samples.size() != target.size()) throw DomainError("samples and target differ in length");
    for (const auto& f : basis) require_admissible(f);

    const auto m = static_cast<Eigen::Index>(samples.size());
    const auto k = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd design(m, k);
    Eigen::VectorXcd rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& y = samples[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < k; ++j) design(i, j) = basis[static_cast<std::size_t>(j)](y);
        rhs(i) = target[static_cast<std::size_t>(i)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(design);
    if (qr.rank() < k) {
        throw RankDeficientBasis("basis restricted to the samples has rank " +
                                 std::to_string(qr.rank()) + " < " + std::to_string(k));
    }
    const Eigen::VectorXcd w = qr.solve(rhs);

    BalayageFit fit;
    fit.weights.assign(w.data(), w.data() + w.size());
    const Eigen::VectorXcd dev = design * w - rhs;
    fit.max_boundary_error = dev.cwiseAbs().maxCoeff();
    return fit;
}

double diffusion_w(double a, double b, double x1, double x2) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("diffusion_w needs a, b > 0");
    if (std::abs(a - b) <= 1e-12 * (a + b)) throw DomainError("diffusion_w needs a != b");
    const double s = 3.0 * (a + 2.0 * b);
    const double t = 3.0 * (2.0 * a + b);
    const double k = (a + 2.0 * b) / (a - b);
    const double diag = std::exp(-s * (x1 - x2));
    return diag + k * diag * std::exp(-t * x2) - k * std::exp(-t * x1);
}

double diffusion_generator_fd(double a, double b, double x1, double x2, double h) {
    auto v = [&](double u1, double u2) { return diffusion_w(a, b, u1, u2); };
    const double c = v(x1, x2);
    const double d1 = (v(x1 + h, x2) - v(x1 - h, x2)) / (2 * h);
    const double d2 = (v(x1, x2 + h) - v(x1, x2 - h)) / (2 * h);
    const double d11 = (v(x1 + h, x2) - 2 * c + v(x1 - h, x2)) / (h * h);
    const double d22 = (v(x1, x2 + h) - 2 * c + v(x1, x2 - h)) / (h * h);
    const double d12 =
        (v(x1 + h, x2 + h) - v(x1 + h, x2 - h) - v(x1 - h, x2 + h) + v(x1 - h, x2 - h)) / (4 * h * h);
    // drift (2a+b, a-b), second-order part (1/6) [[2,1],[1,2]] : Hessian
    return (2 * a + b) * d1 + (a - b) * d2 + (d11 + d12 + d22) / 3.0;
}

double diffusion_neumann_fd(double a, double b, double x1, double h) {
    return (diffusion_w(a, b, x1, h) - diffusion_w(a, b, x1, -h)) / (2 * h);
}

}  // namespace tandemq
