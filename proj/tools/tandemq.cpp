// tandemq: exact, approximate and simulated overflow probabilities for
// two- and three-station tandem queues.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage or domain error,
// 3 iterative solver did not converge.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tandemq/charsurface.hpp"
#include "tandemq/errors.hpp"
#include "tandemq/exactsolve.hpp"
#include "tandemq/harmonic.hpp"
#include "tandemq/model.hpp"
#include "tandemq/montecarlo.hpp"
#include "tandemq/report.hpp"

using namespace tandemq;
using json = nlohmann::json;

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;

struct Globals {
    double lambda = 0.1;
    double mu1 = 0.4;
    double mu2 = 0.5;
    std::optional<double> mu3;
    std::string format = "text";
    std::string out;
    std::uint64_t seed = 1;
    std::string config;
};

template <class T>
std::vector<T> parse_list(const std::string& s) {
    std::vector<T> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::istringstream is(item);
        T value{};
        if (!(is >> value) || !(is >> std::ws).eof()) throw DomainError("cannot parse '" + s + "' as a list");
        v.push_back(value);
    }
    if (v.empty()) throw DomainError("empty list");
    return v;
}

LatticePoint parse_point(const std::string& s) {
    const auto v = parse_list<std::int64_t>(s);
    if (v.size() == 2) return {v[0], v[1]};
    if (v.size() == 3) return {v[0], v[1], v[2]};
    throw DomainError("a point needs 2 or 3 coordinates: " + s);
}

cplx parse_complex(const std::string& s) {
    const auto v = parse_list<double>(s);
    if (v.size() == 1) return {v[0], 0.0};
    if (v.size() == 2) return {v[0], v[1]};
    throw DomainError("a complex number is 're' or 're,im': " + s);
}

std::string sci(double v, int digits = 5) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

class Cli {
public:
    Cli() : app_("Overflow probabilities of tandem queues: exact solve, closed-form approximation, simulation") {
        app_.require_subcommand(1);
        app_.fallthrough();
        app_.option_defaults()->always_capture_default();
        app_.add_option("--lambda", g_.lambda, "arrival weight");
        app_.add_option("--mu1", g_.mu1, "service weight, station 1");
        app_.add_option("--mu2", g_.mu2, "service weight, station 2");
        app_.add_option("--mu3", g_.mu3, "service weight, station 3 (three-station network)");
        app_.add_option("--format", g_.format, "output format")->check(CLI::IsMember({"text", "csv", "json"}));
        app_.add_option("--out", g_.out, "write output here instead of stdout");
        app_.add_option("--seed", g_.seed, "random seed");
        app_.add_option("--config", g_.config, "JSON file with {\"lambda\": r, \"mu\": [r, ...]}")
            ->check(CLI::ExistingFile);

        add_exact();
        add_approx();
        add_simulate();
        add_sweep();
        add_charsurf();
        add_ld_rate();
        add_verify();
        add_fit();
    }

    int run(int argc, char** argv) {
        try {
            app_.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app_.exit(e);
            return code == 0 ? 0 : kExitUsage;
        }
        try {
            return action_();
        } catch (const NotConverged& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitNotConverged;
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitUsage;
        } catch (const json::exception& e) {
            std::cerr << "error: bad config: " << e.what() << '\n';
            return kExitUsage;
        }
    }

private:
    Rates rates() const {
        json j = {{"lambda", g_.lambda}, {"mu", {g_.mu1, g_.mu2}}};
        if (!g_.config.empty()) {
            std::ifstream in(g_.config);
            j = json::parse(in);
            // Explicit flags win over the file.
            if (app_.count("--lambda")) j["lambda"] = g_.lambda;
            if (app_.count("--mu1")) j["mu"][0] = g_.mu1;
            if (app_.count("--mu2")) j["mu"][1] = g_.mu2;
        }
        if (g_.mu3) {
            if (j["mu"].size() < 3) j["mu"].push_back(*g_.mu3);
            else j["mu"][2] = *g_.mu3;
        }
        return Rates::from_json(j);
    }

    std::ostream& out() {
        if (g_.out.empty()) return std::cout;
        if (!file_) {
            file_ = std::make_unique<std::ofstream>(g_.out);
            if (!*file_) throw DomainError("cannot open " + g_.out);
        }
        return *file_;
    }

    bool json_out() const { return g_.format == "json"; }
    bool csv_out() const { return g_.format == "csv"; }

    void add_exact() {
        auto* cmd = app_.add_subcommand("exact", "p_n(x) = P_x(tau_n < tau_0) by Gauss-Seidel");
        auto o = std::make_shared<ExactOpts>();
        cmd->add_option("--n", o->n, "buffer level")->required()->check(CLI::PositiveNumber);
        cmd->add_option("--x", o->x, "start state, e.g. 1,0");
        cmd->add_option("--tol", o->solve.tol, "relative update tolerance");
        cmd->add_option("--max-sweeps", o->solve.max_sweeps, "sweep limit");
        cmd->add_flag("--field", o->field, "emit the whole field");
        cmd->callback([this, o] {
            action_ = [this, o] {
                const auto r = rates();
                const auto field = solve_pn(r, o->n, o->solve);
                if (o->field) {
                    if (json_out()) out() << field_to_json(field).dump(2) << '\n';
                    else write_field_csv(out(), field);
                    return 0;
                }
                if (o->x.empty()) throw DomainError("exact needs --x or --field");
                const auto x = parse_point(o->x);
                if (x.dim() != 2 || x[0] < 0 || x[1] < 0 || x.sum() > o->n) {
                    throw DomainError("x must lie in A_n");
                }
                const double p = field(x);
                if (json_out()) {
                    out() << json{{"n", o->n}, {"x", {x[0], x[1]}}, {"p_exact", p}, {"sweeps", field.sweeps}}.dump(2)
                          << '\n';
                } else if (csv_out()) {
                    out() << "x1,x2,n,p_exact\n" << x[0] << ',' << x[1] << ',' << o->n << ',' << sci(p, 17) << '\n';
                } else {
                    out() << sci(p) << '\n';
                }
                return 0;
            };
        });
    }

    void add_approx() {
        auto* cmd = app_.add_subcommand("approx", "closed-form W*(T_n x), or W*(y) with --y");
        auto o = std::make_shared<ApproxOpts>();
        cmd->add_option("--n", o->n, "buffer level")->check(CLI::PositiveNumber);
        cmd->add_option("--x", o->x, "state of X; evaluated at T_n(x)");
        cmd->add_option("--y", o->y, "state of Y, e.g. 3,1 or 6,1,2");
        cmd->add_flag("--log", o->log, "print log W* (two stations only)");
        cmd->callback([this, o] {
            action_ = [this, o] {
                const auto r = rates();
                LatticePoint y;
                if (!o->y.empty()) {
                    y = parse_point(o->y);
                } else {
                    if (o->x.empty() || o->n == 0) throw DomainError("approx needs --n and --x, or --y");
                    y = transform_tn(o->n, parse_point(o->x));
                }
                if (y.dim() != r.dim()) throw DomainError("point dimension does not match the number of stations");
                const double v = o->log ? log_w_star_2d(r, y) : w_star(r, y);
                const char* key = o->log ? "log_w_star" : "w_star";
                json yj = json::array();
                for (int i = 0; i < y.dim(); ++i) yj.push_back(y[i]);
                if (json_out()) {
                    out() << json{{"y", yj}, {key, v}}.dump(2) << '\n';
                } else if (csv_out()) {
                    out() << "y," << key << "\n\"" << y.str() << "\"," << sci(v, 17) << '\n';
                } else {
                    out() << sci(v) << '\n';
                }
                return 0;
            };
        });
    }

    void add_simulate() {
        auto* cmd = app_.add_subcommand("simulate", "plain Monte Carlo for X (p_n) or Y (P_y(tau < inf))");
        auto o = std::make_shared<SimOpts>();
        cmd->add_option("--walk", o->walk, "x: constrained walk on A_n, y: limit walk")
            ->check(CLI::IsMember({"x", "y"}));
        cmd->add_option("--n", o->n, "buffer level (walk x)");
        cmd->add_option("--x", o->start, "start state (walk x)");
        cmd->add_option("--y", o->start_y, "start state (walk y)");
        cmd->add_option("--paths", o->paths, "number of paths")->check(CLI::PositiveNumber);
        cmd->add_option("--escape-gap", o->escape_gap, "walk y: stop at y1 - y2 - ... = N")->check(CLI::PositiveNumber);
        cmd->add_option("--workers", o->workers, "threads; 0 = hardware concurrency");
        cmd->callback([this, o] {
            action_ = [this, o] {
                const auto r = rates();
                const bool x_walk = o->walk == "x";
                const std::string start = x_walk ? o->start : o->start_y;
                if (start.empty()) throw DomainError(x_walk ? "simulate needs --x" : "simulate needs --y");
                if (x_walk && o->n <= 0) throw DomainError("simulate --walk x needs --n");
                SimConfig cfg{.rates = r,
                              .kind = x_walk ? WalkKind::ConstrainedX : WalkKind::LimitY,
                              .start = parse_point(start),
                              .paths = o->paths,
                              .seed = g_.seed,
                              .escape_gap = o->escape_gap,
                              .buffer_n = o->n,
                              .workers = o->workers};
                const auto est = simulate(cfg);
                if (est.unstable_rates) std::cerr << "warning: unstable rates, simulated anyway\n";
                if (json_out()) {
                    out() << est.to_json().dump(2) << '\n';
                } else if (csv_out()) {
                    out() << "p_hat,std_err,hits,escapes,paths,seed,bias_bound\n"
                          << sci(est.p_hat, 17) << ',' << sci(est.std_err, 17) << ',' << est.hits << ','
                          << est.escapes << ',' << est.paths << ',' << est.seed << ',' << sci(est.bias_bound, 17)
                          << '\n';
                } else {
                    out() << sci(est.p_hat, 6) << " +- " << sci(1.96 * est.std_err, 3) << " (95%, " << est.paths
                          << " paths, seed " << est.seed;
                    if (!x_walk) out() << ", escape bias <= " << sci(est.bias_bound, 3);
                    out() << ")\n";
                }
                return 0;
            };
        });
    }

    void add_sweep() {
        auto* cmd = app_.add_subcommand("sweep", "exact vs approximation over the interior of A_n");
        auto o = std::make_shared<SweepOpts>();
        cmd->add_option("--n", o->n, "buffer level")->required()->check(CLI::PositiveNumber);
        cmd->add_option("--stride", o->stride, "grid stride")->check(CLI::PositiveNumber);
        cmd->add_option("--tol", o->solve.tol, "relative update tolerance");
        cmd->add_option("--max-sweeps", o->solve.max_sweeps, "sweep limit");
        cmd->add_option("--min-total", o->min_total, "summary excludes x1 + x2 below this");
        cmd->callback([this, o] {
            action_ = [this, o] {
                const auto r = rates();
                const auto rows = sweep(r, o->n, o->stride, o->solve);
                if (json_out()) {
                    json arr = json::array();
                    for (const auto& row : rows) {
                        arr.push_back({{"x1", row.x1}, {"x2", row.x2}, {"n", row.n}, {"p_exact", row.p_exact},
                                       {"w_star", row.w_star}, {"v_n", row.v_n}, {"w_n", row.w_n},
                                       {"rel_err", row.rel_err}});
                    }
                    out() << json{{"rows", arr},
                                  {"summary",
                                   {{"min_total", o->min_total},
                                    {"max_log_scale_error", max_log_scale_error(rows, o->min_total)},
                                    {"max_probability_error", max_probability_error(rows, o->min_total)}}}}
                                 .dump(2)
                          << '\n';
                } else {
                    write_sweep_csv(out(), rows);
                }
                return 0;
            };
        });
    }

    void add_charsurf() {
        auto* cmd = app_.add_subcommand("charsurf", "real section of the characteristic surface, CSV alpha,beta");
        auto o = std::make_shared<CharOpts>();
        cmd->add_option("--alpha-min", o->lo, "first grid value")->check(CLI::PositiveNumber);
        cmd->add_option("--alpha-max", o->hi, "last grid value")->check(CLI::PositiveNumber);
        cmd->add_option("--alpha-steps", o->steps, "grid size")->check(CLI::Range(2, 10'000'000));
        cmd->add_option("--alpha", o->list, "explicit comma-separated grid");
        cmd->callback([this, o] {
            action_ = [this, o] {
                const auto r = rates();
                std::vector<double> grid;
                if (!o->list.empty()) {
                    grid = parse_list<double>(o->list);
                } else {
                    if (o->hi <= o->lo) throw DomainError("--alpha-max must exceed --alpha-min");
                    for (int i = 0; i < o->steps; ++i) grid.push_back(o->lo + (o->hi - o->lo) * i / (o->steps - 1));
                }
                const auto pts = real_section(r, grid);
                if (json_out()) {
                    json arr = json::array();
                    for (const auto& p : pts) arr.push_back({{"alpha", p.alpha}, {"beta", p.beta}});
                    out() << arr.dump(2) << '\n';
                } else {
                    out() << "alpha,beta\n" << std::setprecision(17);
                    for (const auto& p : pts) out() << p.alpha << ',' << p.beta << '\n';
                }
                return 0;
            };
        });
    }

    void add_ld_rate() {
        auto* cmd = app_.add_subcommand("ld-rate", "large-deviation decay rate V(x) of p_n(floor(n x))");
        auto o = std::make_shared<LdOpts>();
        cmd->add_option("--x", o->x, "point of the open unit simplex, e.g. 0.3,0.2")->required();
        cmd->add_option("--check-n", o->check, "also solve exactly at these n, e.g. 20,40,60");
        cmd->callback([this, o] {
            action_ = [this, o] {
                const auto r = rates();
                const auto x = parse_list<double>(o->x);
                if (x.size() != 2) throw DomainError("--x needs two coordinates");
                const auto rep = ld_rate(r, x[0], x[1]);
                std::vector<LdCheckRow> rows;
                if (!o->check.empty()) {
                    const auto ns = parse_list<std::int64_t>(o->check);
                    rows = ld_rate_check(r, x[0], x[1], ns);
                }
                if (json_out()) {
                    auto j = rep.to_json();
                    j["check"] = json::array();
                    for (const auto& row : rows) j["check"].push_back({{"n", row.n}, {"v_n", row.v_n}, {"gap", row.gap}});
                    out() << j.dump(2) << '\n';
                } else if (csv_out()) {
                    out() << "n,v_n,v_of_x,gap\n" << std::setprecision(17);
                    for (const auto& row : rows) out() << row.n << ',' << row.v_n << ',' << rep.v_of_x << ',' << row.gap << '\n';
                } else {
                    out() << "gamma  " << sci(rep.gamma, 8) << '\n'
                          << "V(x)   " << sci(rep.v_of_x, 8) << '\n'
                          << "r1     (" << sci(rep.r1[0], 8) << ", " << sci(rep.r1[1], 8) << ")\n"
                          << "r3     (" << sci(rep.r3[0], 8) << ", " << sci(rep.r3[1], 8) << ")\n";
                    for (const auto& row : rows) {
                        out() << "n=" << row.n << "  V_n " << sci(row.v_n, 8) << "  |V_n - V(x)| " << sci(row.gap, 3)
                              << '\n';
                    }
                }
                return 0;
            };
        });
    }

    void add_verify() {
        auto* cmd = app_.add_subcommand("verify", "run the invariant suite; exit 1 on any failure");
        cmd->callback([this] {
            action_ = [this] {
                const auto r = rates();
                const auto rep = verify(r);
                if (json_out()) {
                    out() << rep.to_json().dump(2) << '\n';
                } else {
                    for (const auto& c : rep.checks) {
                        out() << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
                    }
                    for (const auto& n : rep.notices) out() << "note " << n << '\n';
                }
                return rep.passed() ? 0 : kExitVerifyFailed;
            };
        });
    }

    void add_fit() {
        auto* cmd = app_.add_subcommand(
            "fit", "least-squares fit of a constant boundary value on y1 = y2 by h_beta functions");
        auto o = std::make_shared<FitOpts>();
        cmd->add_option("--beta", o->betas, "basis element h_beta, 're' or 're,im'; repeatable");
        cmd->add_flag("--no-rho1-bracket", o->no_bracket, "leave [(rho1,rho1),.] out of the basis");
        cmd->add_option("--samples", o->samples, "boundary points (k,k), k < samples")->check(CLI::PositiveNumber);
        cmd->add_option("--target", o->target, "constant boundary value");
        cmd->callback([this, o] {
            action_ = [this, o] {
                const auto r = rates();
                r.require_stable();
                std::vector<LogLinearCombination> basis;
                std::vector<std::string> labels;
                if (o->betas.empty()) {
                    basis.push_back(make_h_beta(r, ConjugatePair{r.rho(2), 1.0, r.rho(1)}));
                    labels.push_back("h_rho2");
                }
                for (const auto& s : o->betas) {
                    const cplx b = parse_complex(s);
                    auto h = make_h_beta(r, b);
                    require_admissible(h);
                    basis.push_back(std::move(h));
                    labels.push_back("h_beta(" + s + ")");
                }
                if (!o->no_bracket) {
                    basis.push_back(make_bracket(r.rho(1), {r.rho(1)}));
                    labels.push_back("[(rho1,rho1),.]");
                }
                const auto samples = diagonal_samples(o->samples);
                const std::vector<double> target(samples.size(), o->target);
                const auto fit = balayage_fit(basis, samples, target);
                if (json_out()) {
                    json w = json::array();
                    for (std::size_t i = 0; i < basis.size(); ++i) {
                        w.push_back({{"element", labels[i]}, {"weight", cplx_json(fit.weights[i])}});
                    }
                    out() << json{{"weights", w}, {"max_boundary_error", fit.max_boundary_error}}.dump(2) << '\n';
                } else {
                    out() << "element,weight_re,weight_im\n" << std::setprecision(17);
                    for (std::size_t i = 0; i < basis.size(); ++i) {
                        out() << '"' << labels[i] << "\"," << fit.weights[i].real() << ',' << fit.weights[i].imag()
                              << '\n';
                    }
                    std::cerr << "max boundary error " << sci(fit.max_boundary_error, 3) << '\n';
                }
                return 0;
            };
        });
    }

    struct ExactOpts {
        std::int64_t n = 0;
        std::string x;
        SolveOptions solve;
        bool field = false;
    };
    struct ApproxOpts {
        std::int64_t n = 0;
        std::string x, y;
        bool log = false;
    };
    struct SimOpts {
        std::string walk = "x";
        std::int64_t n = 0;
        std::string start, start_y;
        std::uint64_t paths = 100'000;
        std::int64_t escape_gap = 40;
        unsigned workers = 0;
    };
    struct SweepOpts {
        std::int64_t n = 0;
        std::int64_t stride = 1;
        std::int64_t min_total = 5;
        SolveOptions solve;
    };
    struct CharOpts {
        double lo = 0.05;
        double hi = 2.0;
        int steps = 200;
        std::string list;
    };
    struct LdOpts {
        std::string x;
        std::string check;
    };
    struct FitOpts {
        std::vector<std::string> betas;
        bool no_bracket = false;
        std::size_t samples = 50;
        double target = 1.0;
    };

    CLI::App app_;
    Globals g_;
    std::function<int()> action_;
    std::unique_ptr<std::ofstream> file_;
};

}  // namespace

int main(int argc, char** argv) {
    Cli cli;
    return cli.run(argc, argv);
}
