#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tandemq/charsurface.hpp"
#include "tandemq/errors.hpp"
#include "tandemq/exactsolve.hpp"
#include "tandemq/harmonic.hpp"
#include "tandemq/montecarlo.hpp"
#include "tandemq/report.hpp"

namespace py = pybind11;
using namespace tandemq;

namespace {

LatticePoint to_point(const std::vector<std::int64_t>& v) {
    if (v.size() == 2) return {v[0], v[1]};
    if (v.size() == 3) return {v[0], v[1], v[2]};
    throw DomainError("a point needs 2 or 3 coordinates");
}

std::vector<std::int64_t> from_point(const LatticePoint& p) {
    std::vector<std::int64_t> v;
    for (int i = 0; i < p.dim(); ++i) v.push_back(p[i]);
    return v;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Overflow probabilities of tandem queues";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<UnstableRates>(m, "UnstableRates", base.ptr());
    py::register_exception<EqualRates>(m, "EqualRates", base.ptr());
    py::register_exception<NotConverged>(m, "NotConverged", base.ptr());

    py::class_<Rates>(m, "Rates")
        .def(py::init<double, std::vector<double>>(), py::arg("lam"), py::arg("mu"))
        .def_property_readonly("lam", &Rates::lambda)
        .def_property_readonly("mu", &Rates::mus)
        .def_property_readonly("dim", &Rates::dim)
        .def("rho", &Rates::rho, py::arg("i"))
        .def("stable", &Rates::stable)
        .def("__repr__", &Rates::describe);

    m.def("transform_tn", [](std::int64_t n, const std::vector<std::int64_t>& x) {
        return from_point(transform_tn(n, to_point(x)));
    }, py::arg("n"), py::arg("x"));

    m.def("eval_p", &eval_p, py::arg("rates"), py::arg("beta"), py::arg("alpha"));
    m.def("discriminant", &discriminant, py::arg("rates"), py::arg("beta"));
    m.def("solve_alpha", [](const Rates& r, cplx b) {
        const auto p = solve_alpha(r, b);
        return py::make_tuple(p.alpha1, p.alpha2);
    }, py::arg("rates"), py::arg("beta"));
    m.def("real_section", [](const Rates& r, const std::vector<double>& grid) {
        std::vector<std::pair<double, double>> out;
        for (const auto& p : real_section(r, grid)) out.emplace_back(p.alpha, p.beta);
        return out;
    }, py::arg("rates"), py::arg("alpha_grid"));

    m.def("w_star", [](const Rates& r, const std::vector<std::int64_t>& y) { return w_star(r, to_point(y)); },
          py::arg("rates"), py::arg("y"));

    m.def("solve_pn", [](const Rates& r, std::int64_t n, double tol) {
        SolveOptions opts;
        opts.tol = tol;
        const auto f = solve_pn(r, n, opts);
        std::vector<std::vector<double>> rows;
        for (std::int64_t a = 0; a <= n; ++a) {
            rows.emplace_back();
            for (std::int64_t b = 0; a + b <= n; ++b) rows.back().push_back(f.at(a, b));
        }
        return rows;
    }, "rows[x1][x2] = p_n(x1, x2)", py::arg("rates"), py::arg("n"), py::arg("tol") = 1e-12);

    m.def("horizon_dp", [](const Rates& r, const std::vector<std::int64_t>& y, int k) {
        return horizon_dp(r, to_point(y), k);
    }, py::arg("rates"), py::arg("y"), py::arg("horizon"));

    m.def("simulate_pn", [](const Rates& r, std::int64_t n, const std::vector<std::int64_t>& x,
                            std::uint64_t paths, std::uint64_t seed) {
        const SimConfig cfg{.rates = r, .kind = WalkKind::ConstrainedX, .start = to_point(x),
                            .paths = paths, .seed = seed, .buffer_n = n};
        py::gil_scoped_release release;
        const auto e = simulate_pn(cfg);
        return std::make_tuple(e.p_hat, e.std_err);
    }, py::arg("rates"), py::arg("n"), py::arg("x"), py::arg("paths") = 100000, py::arg("seed") = 1);

    m.def("sweep", [](const Rates& r, std::int64_t n, std::int64_t stride) {
        std::vector<std::tuple<std::int64_t, std::int64_t, double, double, double>> out;
        for (const auto& row : sweep(r, n, stride)) out.emplace_back(row.x1, row.x2, row.p_exact, row.w_star, row.rel_err);
        return out;
    }, "(x1, x2, p_exact, w_star, rel_err) per interior point", py::arg("rates"), py::arg("n"), py::arg("stride") = 1);

    m.def("verify", [](const Rates& r) {
        const auto rep = verify(r);
        py::dict d;
        for (const auto& c : rep.checks) d[py::str(c.name)] = c.passed;
        return d;
    }, py::arg("rates"));
}
