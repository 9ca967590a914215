#include "tandemq/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "tandemq/charsurface.hpp"
#include "tandemq/errors.hpp"
#include "tandemq/harmonic.hpp"

namespace tandemq {

SweepRow make_sweep_row(std::int64_t x1, std::int64_t x2, std::int64_t n, double p_exact, double w_star) {
    const auto nd = static_cast<double>(n);
    return {x1,     x2,     n, p_exact, w_star, -std::log(p_exact) / nd, -std::log(w_star) / nd,
            (w_star - p_exact) / p_exact};
}

std::vector<SweepRow> sweep(const Rates& r, std::int64_t n, std::int64_t stride, const SolveOptions& opts) {
    if (stride < 1) throw DomainError("stride must be positive");
    r.require_stable();
    const auto field = solve_pn(r, n, opts);
    std::vector<SweepRow> rows;
    for (std::int64_t x1 = 0; x1 < n; x1 += stride) {
        for (std::int64_t x2 = 0; x1 + x2 < n; x2 += stride) {
            if (x1 + x2 == 0) continue;
            const LatticePoint x{x1, x2};
            rows.push_back(make_sweep_row(x1, x2, n, field(x), w_star(r, transform_tn(n, x))));
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
    const auto old_precision = os.precision(17);
    os << kSweepCsvHeader << '\n';
    for (const auto& row : rows) {
        os << row.x1 << ',' << row.x2 << ',' << row.n << ',' << row.p_exact << ',' << row.w_star << ','
           << row.v_n << ',' << row.w_n << ',' << row.rel_err << '\n';
    }
    os.precision(old_precision);
}

double max_log_scale_error(std::span<const SweepRow> rows, std::int64_t min_total) {
    double worst = 0.0;
    for (const auto& row : rows) {
        if (row.x1 + row.x2 >= min_total) worst = std::max(worst, std::abs((row.w_n - row.v_n) / row.v_n));
    }
    return worst;
}

double max_probability_error(std::span<const SweepRow> rows, std::int64_t min_total) {
    double worst = 0.0;
    for (const auto& row : rows) {
        if (row.x1 + row.x2 >= min_total) worst = std::max(worst, std::abs(row.rel_err));
    }
    return worst;
}

std::int64_t error_layer_width(std::span<const SweepRow> rows, std::int64_t min_total, double bound) {
    std::int64_t width = -1;
    for (const auto& row : rows) {
        if (row.x1 + row.x2 >= min_total && std::abs(row.rel_err) > bound) width = std::max(width, row.x1);
    }
    return width;
}

nlohmann::json LdRateReport::to_json() const {
    return {{"gamma", gamma}, {"v_of_x", v_of_x}, {"r1", r1}, {"r3", r3}};
}

LdRateReport ld_rate(const Rates& r, double x1, double x2) {
    if (r.dim() != 2) throw DomainError("ld_rate handles two stations");
    r.require_stable();
    if (!(x1 >= 0.0 && x2 >= 0.0 && x1 + x2 > 0.0 && x1 + x2 < 1.0)) {
        throw DomainError("ld_rate needs x >= 0 with 0 < x1 + x2 < 1");
    }
    const double lr1 = std::log(r.rho(1));
    const double lr2 = std::log(r.rho(2));
    LdRateReport rep;
    rep.gamma = -std::max(lr1, lr2);
    rep.r1 = {-rep.gamma, 0.0};
    rep.r3 = {lr2, lr2};
    rep.v_of_x = std::min(-lr1 + rep.r1[0] * x1 + rep.r1[1] * x2, -lr2 + rep.r3[0] * x1 + rep.r3[1] * x2);
    return rep;
}

namespace {

// floor(n x) with a guard so that e.g. 0.3 * 60 lands on 18.
std::int64_t scaled_floor(std::int64_t n, double x) {
    return static_cast<std::int64_t>(std::floor(static_cast<double>(n) * x + 1e-9));
}

}  // namespace

std::vector<LdCheckRow> ld_rate_check(const Rates& r, double x1, double x2, std::span<const std::int64_t> ns) {
    const auto rep = ld_rate(r, x1, x2);
    std::vector<LdCheckRow> rows;
    for (auto n : ns) {
        const LatticePoint xn{scaled_floor(n, x1), scaled_floor(n, x2)};
        if (xn.sum() == 0 || xn.sum() >= n) throw DomainError("floor(n x) is not interior for n=" + std::to_string(n));
        const auto field = solve_pn(r, n);
        const double vn = -std::log(field(xn)) / static_cast<double>(n);
        rows.push_back({n, vn, std::abs(vn - rep.v_of_x)});
    }
    return rows;
}

RelErrorRow relative_error_at(const Rates& r, double x1, double x2, std::int64_t n) {
    const LatticePoint xn{scaled_floor(n, x1), scaled_floor(n, x2)};
    if (boundary_membership(n, xn) != Membership::Interior) {
        throw DomainError("floor(n x) = " + xn.str() + " is not interior to A_n");
    }
    SolveOptions opts;
    opts.tol = 1e-30;
    const auto field = solve_pn_as<Quad>(r, n, opts);
    const Quad p = field(xn);
    const Quad w = w_star_2d_as<Quad>(r, transform_tn(n, xn));
    return {n, xn, static_cast<double>(p), static_cast<double>(w), static_cast<double>((w - p) / p)};
}

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return {{"passed", passed()}, {"checks", arr}, {"notices", notices}};
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(3) << v;
    return os.str();
}

class Suite {
public:
    explicit Suite(VerificationReport& rep) : rep_(rep) {}
    void check(std::string name, bool ok, std::string detail) {
        rep_.checks.push_back({std::move(name), ok, std::move(detail)});
    }
    void notice(std::string text) { rep_.notices.push_back(std::move(text)); }

private:
    VerificationReport& rep_;
};

void verify_surface(const Rates& r, Suite& s) {
    const auto betas = sample_admissible_betas(r, 200, 7);
    double worst_res = 0.0, worst_prod = 0.0;
    for (auto b : betas) {
        const auto pair = solve_alpha(r, b);
        worst_res = std::max({worst_res, std::abs(eval_p(r, b, pair.alpha1) - 1.0),
                              std::abs(eval_p(r, b, pair.alpha2) - 1.0)});
        worst_prod = std::max(worst_prod, std::abs(pair.alpha1 * pair.alpha2 - r.mu(2) * b / r.mu(1)));
    }
    s.check("root-identities", worst_res <= 1e-12 && worst_prod <= 1e-12,
            "max |p-1| " + fmt(worst_res) + ", max product error " + fmt(worst_prod));

    const double mu1_minus_lambda = r.mu(1) - r.lambda();
    const double disc_err = std::abs(discriminant(r, r.rho(2)) - mu1_minus_lambda * mu1_minus_lambda);
    s.check("discriminant-at-rho2", disc_err <= 1e-12, "error " + fmt(disc_err));

    const SurfacePoint corner{r.rho(1), r.rho(1)};
    s.check("h-intersection", on_h(r, corner) && on_h2(r, corner), "(rho1, rho1) on H and H2");

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> q(-5.0, 5.0);
    double worst_h = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double q1 = q(gen), q2 = q(gen);
        const double rhs = -std::log(std::real(eval_p(r, std::exp(q1), std::exp(q1 - q2))));
        worst_h = std::max(worst_h, std::abs(hamiltonian(r, q1, q2) - rhs));
    }
    s.check("hamiltonian-identity", worst_h <= 1e-12, "max deviation " + fmt(worst_h));
}

void verify_2d(const Rates& r, Suite& s) {
    verify_surface(r, s);
    const auto box = default_sample_box(2);

    if (r.nearly_equal(1, 2)) {
        s.notice("mu1 == mu2: equal-rates branch exercised, log-linear W* checks skipped");
        const double mu = r.mu(1);
        const double rho = r.lambda() / mu;
        const LatticeFunction w = [&](const LatticePoint& y) {
            const auto d = y[0] - y[1];
            return cplx{ipow(rho, d) + (mu - r.lambda()) / mu * ipow(rho, y[0]) * static_cast<double>(d), 0.0};
        };
        const auto rep = residual_check(r, WalkKind::LimitY, w, box);
        s.check("equal-rates-harmonic", rep.harmonic(), "max residual " + fmt(rep.max()));
        bool ones = true;
        for (std::int64_t k = 0; k <= 50; ++k) ones = ones && w_equal_rates(r, {k, k}) == 1.0;
        s.check("equal-rates-boundary", ones, "W(k,k) == 1 for k <= 50");
    } else {
        const auto wstar = make_w_star_2d(r);
        const auto rep = residual_check(r, WalkKind::LimitY, wstar, box);
        s.check("w-star-harmonic", rep.harmonic(), "max residual " + fmt(rep.max()));

        bool ones = true, in_range = true;
        double worst_match = 0.0;
        for (const auto& y : box) {
            const double v = w_star_2d(r, y);
            if (y[0] == y[1]) ones = ones && std::abs(v - 1.0) <= 3 * std::numeric_limits<double>::epsilon();
            in_range = in_range && v >= 0.0 && v <= 1.0;
            worst_match = std::max(worst_match, std::abs(wstar.real_at(y) - v) / v);
        }
        s.check("w-star-boundary", ones, "W*(k,k) == 1 within 3 ulp");
        s.check("w-star-range", in_range, "0 <= W* <= 1 on the sample box");
        s.check("w-star-closed-form", worst_match <= 1e-10, "bracket form vs closed form " + fmt(worst_match));

        const auto single = residual_check(r, WalkKind::LimitY, make_bracket(r.rho(1), {r.rho(1)}), box);
        s.check("single-term-harmonic", single.harmonic(), "max residual " + fmt(single.max()));

        double worst_hb = 0.0;
        for (auto b : sample_admissible_betas(r, 5, 3)) {
            worst_hb = std::max(worst_hb, residual_check(r, WalkKind::LimitY, make_h_beta(r, b), box).max());
        }
        s.check("h-beta-harmonic", worst_hb <= 1e-12, "max residual " + fmt(worst_hb));

        const std::vector<LogLinearCombination> basis{make_h_beta(r, ConjugatePair{r.rho(2), 1.0, r.rho(1)}),
                                                      make_bracket(r.rho(1), {r.rho(1)})};
        const auto samples = diagonal_samples(50);
        const std::vector<double> ones_target(samples.size(), 1.0);
        const auto fit = balayage_fit(basis, samples, ones_target);
        s.check("balayage-recovery", fit.max_boundary_error <= 1e-10,
                "max boundary error " + fmt(fit.max_boundary_error));
    }

    const LatticePoint y{3, 1};
    const int ks[] = {25, 50, 100};
    const auto seq = horizon_dp_sequence(r, y, ks);
    const double w = w_star(r, y);
    const bool bracket = seq[0] <= seq[1] && seq[1] <= seq[2] && seq[2] <= w * (1.0 + 1e-12);
    s.check("oracle-bracket", bracket, "P(tau<=100) = " + fmt(seq[2]) + ", W* = " + fmt(w));

    SolveOptions opts;
    const auto field = solve_pn(r, 20, opts);
    const double fp = fixed_point_residual(r, field);
    bool range = true;
    for (std::int64_t x1 = 0; x1 <= 20; ++x1) {
        for (std::int64_t x2 = 0; x1 + x2 <= 20; ++x2) range = range && field.at(x1, x2) >= 0.0 && field.at(x1, x2) <= 1.0;
    }
    s.check("exact-solver", fp <= 10 * opts.tol && range,
            "fixed-point residual " + fmt(fp) + " after " + std::to_string(field.sweeps) + " sweeps");
}

void verify_3d(const Rates& r, Suite& s) {
    if (r.nearly_equal(1, 2) || r.nearly_equal(1, 3) || r.nearly_equal(2, 3)) {
        s.notice("repeated service rates: three-station closed form is not defined, skipped");
        return;
    }
    const auto box = default_sample_box(3);
    const auto rep = residual_check(r, WalkKind::LimitY, make_w_star_3d(r), box);
    s.check("w-star-3d-harmonic", rep.harmonic(), "max residual " + fmt(rep.max()));

    bool ones = true;
    for (const auto& y : box) {
        if (y.excess() == 0) ones = ones && std::abs(w_star_3d(r, y) - 1.0) <= 1e-12;
    }
    s.check("w-star-3d-boundary", ones, "W* == 1 on y1 = y2 + y3");

    const LatticePoint y{6, 1, 2};
    const int ks[] = {20, 40};
    const auto seq = horizon_dp_sequence(r, y, ks);
    const double w = w_star_3d(r, y);
    s.check("oracle-bracket-3d", seq[0] <= seq[1] && seq[1] <= w * (1.0 + 1e-12),
            "P(tau<=40) = " + fmt(seq[1]) + ", W* = " + fmt(w));
}

}  // namespace

VerificationReport verify(const Rates& r) {
    VerificationReport rep;
    Suite s(rep);
    s.check("stability", r.stable(), r.describe());
    if (!r.stable()) {
        s.notice("unstable rates: remaining checks need lambda < mu_i and were skipped");
        return rep;
    }
    if (r.dim() == 2) {
        verify_2d(r, s);
    } else {
        verify_3d(r, s);
    }
    return rep;
}

}  // namespace tandemq
