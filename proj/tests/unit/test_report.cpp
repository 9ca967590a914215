#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tandemq/errors.hpp"
#include "tandemq/report.hpp"

using namespace tandemq;

namespace {
const Rates kRates(0.1, {0.4, 0.5});
}

TEST_CASE("sweep rows") {
    const auto rows = sweep(kRates, 60);
    CHECK(rows.size() == 60 * 61 / 2 - 1);
    bool found = false;
    for (const auto& row : rows) {
        CHECK(row.x1 + row.x2 > 0);
        CHECK(row.x1 + row.x2 < 60);
        CHECK(row.v_n == doctest::Approx(-std::log(row.p_exact) / 60).epsilon(1e-15));
        CHECK(row.w_n == doctest::Approx(-std::log(row.w_star) / 60).epsilon(1e-15));
        CHECK(row.rel_err == doctest::Approx((row.w_star - row.p_exact) / row.p_exact).epsilon(1e-15));
        if (row.x1 == 2 && row.x2 == 0) {
            found = true;
            CHECK(row.p_exact == doctest::Approx(4.8364e-35).epsilon(1e-3));
            CHECK(row.w_star == doctest::Approx(4.8148e-35).epsilon(1e-4));
        }
    }
    CHECK(found);
    CHECK(rows.front().x1 == 0);
    CHECK(rows.front().x2 == 1);
    CHECK(max_log_scale_error(rows, 5) <= 0.02);
    CHECK(max_probability_error(rows, 5) >= max_probability_error(rows, 20));
    CHECK(error_layer_width(rows, 5, 0.02) >= 0);
    CHECK(error_layer_width(rows, 5, 1e6) == -1);
}

TEST_CASE("sweep stride and CSV") {
    const auto rows = sweep(kRates, 20, 5);
    for (const auto& row : rows) {
        CHECK(row.x1 % 5 == 0);
        CHECK(row.x2 % 5 == 0);
    }
    std::ostringstream os;
    write_sweep_csv(os, rows);
    std::istringstream in(os.str());
    std::string header, line;
    std::getline(in, header);
    CHECK(header == "x1,x2,n,p_exact,w_star,v_n,w_n,rel_err");
    std::getline(in, line);
    // 17 significant digits round-trip
    const auto pos = line.find(',', line.find(',', line.find(',') + 1) + 1);
    const double p = std::stod(line.substr(pos + 1));
    CHECK(p == rows.front().p_exact);
    CHECK_THROWS_AS(sweep(kRates, 20, 0), DomainError);
    CHECK_THROWS_AS(sweep(Rates(0.5, {0.4, 0.6}), 20), UnstableRates);
}

TEST_CASE("large-deviation rate") {
    const auto rep = ld_rate(kRates, 0.3, 0.2);
    CHECK(rep.gamma == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(rep.v_of_x <= rep.gamma);
    CHECK(rep.r1[0] == doctest::Approx(-rep.gamma));
    CHECK(rep.r3[0] == doctest::Approx(std::log(kRates.rho(2))));
    const auto near0 = ld_rate(kRates, 1e-9, 1e-9);
    CHECK(near0.v_of_x == doctest::Approx(rep.gamma).epsilon(1e-6));
    CHECK_THROWS_AS(ld_rate(kRates, 0.6, 0.5), DomainError);
    CHECK_THROWS_AS(ld_rate(kRates, 0.0, 0.0), DomainError);

    const std::int64_t ns[] = {20, 40, 60};
    const auto rows = ld_rate_check(kRates, 0.3, 0.2, ns);
    CHECK(rows[0].gap > rows[1].gap);
    CHECK(rows[1].gap > rows[2].gap);
    CHECK(rep.to_json().contains("v_of_x"));
}

TEST_CASE("relative error decays") {
    const auto a = relative_error_at(kRates, 0.3, 0.3, 20);
    const auto b = relative_error_at(kRates, 0.3, 0.3, 40);
    CHECK(a.x_n == LatticePoint{6, 6});
    CHECK(std::abs(a.rel_err) > std::abs(b.rel_err));
    CHECK(a.rel_err == doctest::Approx(-2.8915e-6).epsilon(1e-3));
    CHECK(b.rel_err == doctest::Approx(-2.1654e-12).epsilon(1e-3));
}

TEST_CASE("verification suite") {
    const auto ok = verify(kRates);
    CHECK(ok.passed());
    CHECK(ok.checks.size() > 10);
    CHECK(ok.to_json()["passed"] == true);

    const auto bad = verify(Rates(0.5, {0.4, 0.6}));
    CHECK_FALSE(bad.passed());
    CHECK(bad.checks.front().name == "stability");

    const auto eq = verify(Rates(0.1, {0.45, 0.45}));
    CHECK(eq.passed());
    CHECK_FALSE(eq.notices.empty());

    const auto three = verify(Rates(0.1, {0.4, 0.5, 0.3}));
    CHECK(three.passed());
}
