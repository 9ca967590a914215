// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run everything
//   acceptance --only NAME     run one criterion (how ctest invokes it)
//   acceptance --list          print the criterion names

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tandemq/charsurface.hpp"
#include "tandemq/exactsolve.hpp"
#include "tandemq/harmonic.hpp"
#include "tandemq/montecarlo.hpp"
#include "tandemq/report.hpp"

using namespace tandemq;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    std::string name;
    std::function<Outcome()> run;
};

const Rates kGolden(0.1, {0.4, 0.5});
const Rates kThree(0.1, {0.4, 0.5, 0.3});

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string num(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void info(const std::string& s) { std::cout << "INFO " << s << '\n'; }

Outcome golden_exact() {
    Stopwatch clock;
    const auto f = solve_pn(kGolden, 60);
    const double secs = clock.seconds();
    const struct {
        LatticePoint x;
        double expect;
    } cases[] = {{{1, 0}, 1.1285e-35}, {{2, 0}, 4.8364e-35}, {{9, 0}, 7.8888e-31}};
    bool ok = secs < 5.0;
    std::string d;
    for (const auto& c : cases) {
        const double e = rel(f(c.x), c.expect);
        ok = ok && e <= 1e-3;
        d += "p" + c.x.str() + "=" + num(f(c.x), 6) + " (rel " + num(e, 2) + ") ";
    }
    return {ok, d + "in " + num(secs, 2) + " s, " + std::to_string(f.sweeps) + " sweeps"};
}

Outcome golden_wstar() {
    const struct {
        LatticePoint x;
        double expect;
    } cases[] = {{{1, 0}, 1.2037e-35}, {{2, 0}, 4.8148e-35}, {{9, 0}, 7.8885e-31}};
    bool ok = true;
    std::string d;
    for (const auto& c : cases) {
        const double w = w_star_2d(kGolden, transform_tn(60, c.x));
        const double e = rel(w, c.expect);
        ok = ok && e <= 1e-4;
        d += "W*(T60" + c.x.str() + ")=" + num(w, 6) + " (rel " + num(e, 2) + ") ";
    }
    return {ok, d};
}

const std::vector<SweepRow>& golden_sweep() {
    static const auto rows = sweep(kGolden, 60);
    return rows;
}

Outcome sweep_vn_scale() {
    const auto& rows = golden_sweep();
    const double m = max_log_scale_error(rows, 5);
    return {m <= 0.02, "max |(W_n - V_n)/V_n| over x1+x2 >= 5 is " + num(m) + " (bound 0.02)"};
}

Outcome sweep_probability_scale() {
    const auto& rows = golden_sweep();
    const double m = max_probability_error(rows, 5);
    auto worst = rows.front();
    for (const auto& r : rows) {
        if (r.x1 + r.x2 >= 5 && std::abs(r.rel_err) > std::abs(worst.rel_err)) worst = r;
    }
    info("probability-scale error exceeds 0.02 only for x1 <= " + std::to_string(error_layer_width(rows, 5, 0.02)) +
         " (layer along the x2 axis)");
    for (std::int64_t x1 = 0; x1 <= 5; ++x1) {
        double row_max = 0.0;
        for (const auto& r : rows) {
            if (r.x1 == x1 && r.x1 + r.x2 >= 5) row_max = std::max(row_max, std::abs(r.rel_err));
        }
        info("  x1=" + std::to_string(x1) + ": max |rel_err| " + num(row_max, 3));
    }
    return {m <= 0.02, "max |W* - p_n|/p_n over x1+x2 >= 5 is " + num(m) + " at (" + std::to_string(worst.x1) + "," +
                           std::to_string(worst.x2) + ") (bound 0.02)"};
}

Outcome error_decay() {
    Stopwatch clock;
    std::vector<double> errs;
    std::string d;
    for (std::int64_t n : {20, 40, 60}) {
        const auto row = relative_error_at(kGolden, 0.3, 0.3, n);
        errs.push_back(std::abs(row.rel_err));
        d += "n=" + std::to_string(n) + ": " + num(row.rel_err, 5) + "  ";
    }
    const double secs = clock.seconds();
    const double r1 = errs[1] / errs[0];
    const double r2 = errs[2] / errs[1];
    const bool decreasing = errs[0] > errs[1] && errs[1] > errs[2];
    const double spread = std::max(r1, r2) / std::min(r1, r2);
    const bool ok = decreasing && spread <= 2.0 && secs < 30.0;
    return {ok, d + "step ratios " + num(r1, 3) + ", " + num(r2, 3) + " (spread " + num(spread, 3) + " <= 2), " +
                    num(secs, 2) + " s"};
}

Outcome convergence() {
    Stopwatch clock;
    const std::int64_t ns[] = {10, 20, 40};
    const auto rows = convergence_to_limit(kGolden, {3, 0}, ns);
    const double secs = clock.seconds();
    std::string d;
    for (const auto& r : rows) d += "n=" + std::to_string(r.n) + ": gap " + num(r.gap, 4) + "  ";
    const bool ok = rows[0].gap > rows[1].gap && rows[1].gap > rows[2].gap && secs < 5.0;
    return {ok, d + num(secs, 2) + " s"};
}

Outcome harmonicity() {
    Stopwatch clock;
    const auto box2 = default_sample_box(2);
    const auto box3 = default_sample_box(3);
    const double w = residual_check(kGolden, WalkKind::LimitY, make_w_star_2d(kGolden), box2).max();
    double hb = 0.0;
    for (auto b : sample_admissible_betas(kGolden, 20, 2024)) {
        hb = std::max(hb, residual_check(kGolden, WalkKind::LimitY, make_h_beta(kGolden, b), box2).max());
    }
    const double single =
        residual_check(kGolden, WalkKind::LimitY, make_bracket(kGolden.rho(1), {kGolden.rho(1)}), box2).max();
    const double three = residual_check(kThree, WalkKind::LimitY, make_w_star_3d(kThree), box3).max();
    const double secs = clock.seconds();
    const bool ok = std::max({w, hb, single, three}) <= 1e-12 && secs < 10.0;
    return {ok, "max residual W* " + num(w, 2) + ", h_beta(20) " + num(hb, 2) + ", [(rho1,rho1),.] " +
                    num(single, 2) + ", 3-station " + num(three, 2) + "; " + std::to_string(box2.size()) + "+" +
                    std::to_string(box3.size()) + " points, " + num(secs, 2) + " s"};
}

Outcome bracket(const Rates& r, const LatticePoint& y, int k_max, double rel_tol, double& secs_total) {
    Stopwatch clock;
    std::vector<int> ks(static_cast<std::size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) ks[static_cast<std::size_t>(k - 1)] = k;
    const auto seq = horizon_dp_sequence(r, y, ks);
    const double w = w_star(r, y);
    bool below = true, monotone = true;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        below = below && seq[i] <= w;
        if (i > 0) monotone = monotone && seq[i] >= seq[i - 1];
    }
    const double gap = (w - seq.back()) / w;
    secs_total += clock.seconds();
    const bool ok = below && monotone && gap < rel_tol && secs_total < 60.0;
    return {ok, "y=" + y.str() + " DP <= W* for K=1.." + std::to_string(k_max) + ": " + (below ? "yes" : "no") +
                    ", monotone: " + (monotone ? "yes" : "no") + ", relative gap at K=" + std::to_string(k_max) +
                    " is " + num(gap, 3) + " (bound " + num(rel_tol, 1) + "), W*=" + num(w, 8) +
                    ", cumulative " + num(secs_total, 2) + " s"};
}

double g_bracket_secs = 0.0;

Outcome oracle_2d() { return bracket(kGolden, {3, 1}, 200, 1e-10, g_bracket_secs); }

Outcome oracle_3d() {
    const LatticePoint y{6, 1, 2};
    const double tail = horizon_dp(kThree, y, 160);
    const double w = w_star_3d(kThree, y);
    info("3-station relative gap at K=160: " + num((w - tail) / w, 3));
    return bracket(kThree, y, 80, 1e-6, g_bracket_secs);
}

Outcome root_identities() {
    std::mt19937_64 gen(1000);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double res = 0.0, prod = 0.0;
    int count = 0;
    while (count < 1000) {
        const cplx b{u(gen), u(gen)};
        if (std::abs(b) >= 1.0 || b == cplx{0.0, 0.0}) continue;
        const auto p = solve_alpha(kGolden, b);
        res = std::max({res, std::abs(eval_p(kGolden, b, p.alpha1) - 1.0), std::abs(eval_p(kGolden, b, p.alpha2) - 1.0)});
        prod = std::max(prod, std::abs(p.alpha1 * p.alpha2 - kGolden.mu(2) * b / kGolden.mu(1)));
        ++count;
    }
    std::uniform_real_distribution<double> w(0.01, 1.0);
    double disc = 0.0;
    int triples = 0;
    while (triples < 100) {
        const Rates r(w(gen), {w(gen), w(gen)});
        if (!r.stable()) continue;
        const double d = r.mu(1) - r.lambda();
        disc = std::max(disc, std::abs(discriminant(r, r.rho(2)) - d * d));
        ++triples;
    }
    const bool ok = res <= 1e-12 && prod <= 1e-12 && disc <= 1e-12;
    return {ok, "1000 beta: max |p - 1| " + num(res, 2) + ", max product error " + num(prod, 2) +
                    "; 100 rate triples: max |Delta(rho2) - (mu1-lambda)^2| " + num(disc, 2)};
}

Outcome balayage() {
    const std::vector<LogLinearCombination> basis{make_h_beta(kGolden, ConjugatePair{kGolden.rho(2), 1.0, kGolden.rho(1)}),
                                                  make_bracket(kGolden.rho(1), {kGolden.rho(1)})};
    const auto samples = diagonal_samples(50);
    const std::vector<double> ones(samples.size(), 1.0);
    const auto fit = balayage_fit(basis, samples, ones);
    const cplx c21 = coeff_c(kGolden, kGolden.rho(2), kGolden.rho(1));
    const cplx c20 = coeff_c(kGolden, kGolden.rho(2), 1.0);
    const double e0 = std::abs(fit.weights[0] - 1.0 / c21) / std::abs(1.0 / c21);
    const double e1 = std::abs(fit.weights[1] - c20 / c21) / std::abs(c20 / c21);
    const bool ok = fit.max_boundary_error <= 1e-10 && e0 <= 1e-8 && e1 <= 1e-8;
    return {ok, "weights " + num(fit.weights[0].real(), 12) + ", " + num(fit.weights[1].real(), 12) + " vs " +
                    num((1.0 / c21).real(), 12) + ", " + num((c20 / c21).real(), 12) + "; max boundary error " +
                    num(fit.max_boundary_error, 2)};
}

Outcome monte_carlo() {
    Stopwatch clock;
    const Rates r(0.2, {0.4, 0.3});
    const double exact = solve_pn(r, 6).at(1, 0);
    int covered = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const SimConfig cfg{.rates = r,
                            .kind = WalkKind::ConstrainedX,
                            .start = {1, 0},
                            .paths = 200'000,
                            .seed = seed,
                            .buffer_n = 6};
        const auto e = simulate_pn(cfg);
        if (e.ci95_low() <= exact && exact <= e.ci95_high()) ++covered;
    }
    const double secs = clock.seconds();
    return {covered >= 90 && secs < 120.0, "95% CI covered p_6(1,0)=" + num(exact, 8) + " in " +
                                               std::to_string(covered) + "/100 seeds, " + num(secs, 3) + " s"};
}

Outcome equal_rates() {
    const LatticePoint y{5, 2};
    const double mu = 0.45;
    const double target = w_equal_rates(Rates(0.1, {mu, mu}), y);
    std::vector<double> gaps;
    std::string d;
    for (double eps : {1e-3, 1e-4, 1e-5}) {
        gaps.push_back(std::abs(w_star_2d(Rates(0.1, {mu, mu * (1 + eps)}), y) - target));
        d += "eps=" + num(eps, 1) + ": gap " + num(gaps.back(), 4) + " (gap/eps " + num(gaps.back() / eps, 5) + ")  ";
    }
    // Proportional to eps: each tenfold drop in eps divides the gap by 10, within a factor 2.
    bool ok = true;
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        const double ratio = gaps[i - 1] / gaps[i];
        ok = ok && ratio >= 5.0 && ratio <= 20.0;
    }
    return {ok, d};
}

Outcome diffusion() {
    const double a = 1.0, b = 2.0, h = 1e-4;
    std::mt19937_64 gen(72);
    std::uniform_real_distribution<double> gap(0.5, 3.0), x2(0.05, 2.0), x1(0.1, 4.0);
    double lv = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double y = x2(gen);
        lv = std::max(lv, std::abs(diffusion_generator_fd(a, b, y + gap(gen), y, h)));
    }
    double neumann = 0.0;
    for (int i = 0; i < 20; ++i) neumann = std::max(neumann, std::abs(diffusion_neumann_fd(a, b, x1(gen), h)));
    return {lv <= 1e-6 && neumann <= 1e-6, "max |LV| " + num(lv, 3) + " over 100 interior points, max |dV/dx2| " +
                                               num(neumann, 3) + " over 20 boundary points (h=1e-4)"};
}

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {"golden-exact", golden_exact},
        {"golden-wstar", golden_wstar},
        {"golden-sweep-vn-scale", sweep_vn_scale},
        {"golden-sweep-probability-scale", sweep_probability_scale},
        {"error-decay", error_decay},
        {"convergence-to-limit", convergence},
        {"harmonicity", harmonicity},
        {"oracle-bracket-2d", oracle_2d},
        {"oracle-bracket-3d", oracle_3d},
        {"root-identities", root_identities},
        {"balayage-recovery", balayage},
        {"monte-carlo-calibration", monte_carlo},
        {"equal-rates-continuity", equal_rates},
        {"diffusion-analog", diffusion},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--list") {
            for (const auto& c : criteria()) std::cout << c.name << '\n';
            return 0;
        }
        if (arg == "--only" && i + 1 < argc) {
            only = argv[++i];
        } else {
            std::cerr << "usage: acceptance [--only NAME | --list]\n";
            return 2;
        }
    }
    int failures = 0, ran = 0;
    for (const auto& c : criteria()) {
        if (!only.empty() && c.name != only) continue;
        ++ran;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
        if (!o.pass) ++failures;
    }
    if (ran == 0) {
        std::cerr << "unknown criterion " << only << '\n';
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
