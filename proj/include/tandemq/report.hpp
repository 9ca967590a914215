#pragma once

// Exact-vs-approximation sweeps, large-deviation rates and the bundled
// verification suite behind the CLI.

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tandemq/exactsolve.hpp"
#include "tandemq/model.hpp"

namespace tandemq {

struct SweepRow {
    std::int64_t x1 = 0;
    std::int64_t x2 = 0;
    std::int64_t n = 0;
    double p_exact = 0.0;
    double w_star = 0.0;
    double v_n = 0.0;      // -log(p_exact) / n
    double w_n = 0.0;      // -log(w_star) / n
    double rel_err = 0.0;  // (w_star - p_exact) / p_exact
};

SweepRow make_sweep_row(std::int64_t x1, std::int64_t x2, std::int64_t n, double p_exact, double w_star);

/// One row per interior x of A_n on the stride grid, x1-major.
std::vector<SweepRow> sweep(const Rates& r, std::int64_t n, std::int64_t stride = 1,
                            const SolveOptions& opts = {});

inline constexpr const char* kSweepCsvHeader = "x1,x2,n,p_exact,w_star,v_n,w_n,rel_err";
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

/// max |(W_n - V_n) / V_n| over rows with x1 + x2 >= min_total.
double max_log_scale_error(std::span<const SweepRow> rows, std::int64_t min_total);
/// max |rel_err| over rows with x1 + x2 >= min_total.
double max_probability_error(std::span<const SweepRow> rows, std::int64_t min_total);
/// Largest x1 among rows (x1 + x2 >= min_total) whose |rel_err| exceeds bound;
/// -1 when none do.
std::int64_t error_layer_width(std::span<const SweepRow> rows, std::int64_t min_total, double bound);

struct LdRateReport {
    double gamma = 0.0;
    double v_of_x = 0.0;
    std::array<double, 2> r1{};
    std::array<double, 2> r3{};
    nlohmann::json to_json() const;
};

/// gamma = min(-log rho1, -log rho2) and the decay rate
/// V(x) = (-log rho1 + <r1,x>) ^ (-log rho2 + <r3,x>) for 0 < x1 + x2 < 1.
LdRateReport ld_rate(const Rates& r, double x1, double x2);

struct LdCheckRow {
    std::int64_t n;
    double v_n;  // -log p_n(floor(n x)) / n
    double gap;  // |v_n - V(x)|
};
std::vector<LdCheckRow> ld_rate_check(const Rates& r, double x1, double x2,
                                      std::span<const std::int64_t> ns);

struct RelErrorRow {
    std::int64_t n;
    LatticePoint x_n;
    double p_exact;
    double w_star;
    double rel_err;  // (W*(T_n x_n) - p_n(x_n)) / p_n(x_n)
};

/// Relative error of W*(T_n(floor(n x))) against p_n, computed in Quad; the
/// error drops below double resolution within a few dozen n.
RelErrorRow relative_error_at(const Rates& r, double x1, double x2, std::int64_t n);

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    std::vector<std::string> notices;
    bool passed() const;
    nlohmann::json to_json() const;
};

/// Runs the invariant suite for the given rates. Side-effect free.
VerificationReport verify(const Rates& r);

}  // namespace tandemq
