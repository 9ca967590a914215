#include <doctest.h>

#include <cmath>
#include <set>

#include "tandemq/errors.hpp"
#include "tandemq/exactsolve.hpp"
#include "tandemq/harmonic.hpp"
#include "tandemq/montecarlo.hpp"

using namespace tandemq;

namespace {

const Rates kSmall(0.2, {0.4, 0.3});
const Rates kRates(0.1, {0.4, 0.5});

SimConfig x_config(std::uint64_t paths, std::uint64_t seed, unsigned workers = 1) {
    return {.rates = kSmall,
            .kind = WalkKind::ConstrainedX,
            .start = {1, 0},
            .paths = paths,
            .seed = seed,
            .buffer_n = 6,
            .workers = workers};
}

}  // namespace

TEST_CASE("path streams are distinct and reproducible") {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(PathRng(7, i)());
    CHECK(firsts.size() == 1000);
    PathRng a(7, 3), b(7, 3), c(8, 3);
    CHECK(a() == b());
    CHECK(PathRng(7, 3)() != c());
    double sum = 0.0;
    PathRng u(1, 0);
    for (int i = 0; i < 100000; ++i) {
        const double x = u.uniform();
        CHECK_UNARY(x >= 0.0 && x < 1.0);
        sum += x;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("estimates do not depend on the worker count") {
    const auto one = simulate(x_config(20000, 11, 1));
    const auto four = simulate(x_config(20000, 11, 4));
    CHECK(one.hits == four.hits);
    CHECK(one.p_hat == four.p_hat);
    CHECK(one.std_err == four.std_err);
    CHECK(simulate(x_config(20000, 11, 1)).to_json() == one.to_json());
    CHECK(simulate(x_config(20000, 12, 1)).hits != one.hits);
}

TEST_CASE("estimate fields") {
    const auto e = simulate(x_config(50000, 5));
    CHECK(e.paths == 50000);
    CHECK(e.seed == 5);
    CHECK(e.p_hat == doctest::Approx(static_cast<double>(e.hits) / 50000));
    CHECK(e.std_err == doctest::Approx(std::sqrt(e.p_hat * (1 - e.p_hat) / 50000)));
    const double exact = solve_pn(kSmall, 6).at(1, 0);
    CHECK(std::abs(e.p_hat - exact) < 4 * e.std_err);
    const auto j = e.to_json();
    for (const char* k : {"p_hat", "std_err", "hits", "escapes", "paths", "seed", "bias_bound", "ci95"}) {
        CHECK(j.contains(k));
    }
}

TEST_CASE("start on the exit level") {
    auto cfg = x_config(100, 1);
    cfg.start = {4, 2};
    CHECK(simulate(cfg).p_hat == 1.0);
    cfg.start = {0, 0};
    CHECK(simulate(cfg).p_hat == 0.0);
    cfg.start = {5, 2};
    CHECK_THROWS_AS(simulate(cfg), DomainError);
}

TEST_CASE("unstable rates are simulated with a flag") {
    auto cfg = x_config(1000, 1);
    cfg.rates = Rates(0.5, {0.3, 0.2});
    const auto e = simulate(cfg);
    CHECK(e.unstable_rates);
    CHECK(e.p_hat > 0.5);
}

TEST_CASE("three-station X walk") {
    const Rates r(0.1, {0.4, 0.5, 0.3});
    SimConfig cfg{.rates = r, .kind = WalkKind::ConstrainedX, .start = {1, 0, 0}, .paths = 1000, .seed = 2, .buffer_n = 3};
    const auto e = simulate(cfg);
    CHECK(e.p_hat >= 0.0);
    CHECK(e.p_hat <= 1.0);
}

TEST_CASE("limit walk hits the diagonal") {
    SimConfig cfg{.rates = kRates, .kind = WalkKind::LimitY, .start = {3, 1}, .paths = 200000, .seed = 9, .escape_gap = 40};
    const auto e = simulate(cfg);
    const double w = w_star_2d(kRates, {3, 1});
    CHECK(e.bias_bound > 0.0);
    CHECK(e.bias_bound < 1e-20);
    CHECK(w >= e.p_hat - 3 * e.std_err);
    CHECK(w <= e.p_hat + 3 * e.std_err + e.bias_bound);
    CHECK(e.hits + e.escapes == e.paths);

    cfg.start = {2, 2};
    cfg.paths = 10;
    CHECK(simulate(cfg).p_hat == 1.0);
    cfg.start = {45, 2};
    CHECK_THROWS_AS(simulate(cfg), DomainError);
}

TEST_CASE("limit walk in three dimensions") {
    const Rates r(0.1, {0.4, 0.5, 0.3});
    SimConfig cfg{.rates = r, .kind = WalkKind::LimitY, .start = {6, 1, 2}, .paths = 100000, .seed = 4, .escape_gap = 30};
    const auto e = simulate(cfg);
    const double w = w_star_3d(r, {6, 1, 2});
    CHECK(w >= e.p_hat - 4 * e.std_err);
    CHECK(w <= e.p_hat + 4 * e.std_err + e.bias_bound);
}

TEST_CASE("escape bias bound") {
    CHECK(escape_bias_bound(kRates, 40) >= std::pow(kRates.rho(1), 40) * 0.99);
    CHECK(escape_bias_bound(kRates, 40) < escape_bias_bound(kRates, 20));
    CHECK(escape_bias_bound(Rates(0.5, {0.4, 0.6}), 40) == 1.0);
    const Rates eq(0.1, {0.45, 0.45});
    CHECK(escape_bias_bound(eq, 40) == doctest::Approx(w_equal_rates(eq, {40, 0})));
}
