#pragma once

#include <array>
#include <cstdint>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "tandemq/errors.hpp"
#include "tandemq/model.hpp"

namespace tandemq {

/// 113-bit binary float, used where differences fall below double resolution.
using Quad = boost::multiprecision::cpp_bin_float_quad;

/// base^e by repeated squaring; negative exponents invert.
template <class T>
T ipow(T base, std::int64_t e) {
    if (e < 0) return T(1) / ipow(base, -e);
    T result(1);
    while (e > 0) {
        if (e & 1) result *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return result;
}

/// Normalized rates carried in an arbitrary scalar type. Normalization is
/// redone in Real from the raw weights so no double rounding leaks in.
template <class Real>
struct RatesAs {
    explicit RatesAs(const Rates& r) : dim(r.dim()) {
        Real total(r.raw_lambda());
        for (double m : r.raw_mus()) total += Real(m);
        lambda = Real(r.raw_lambda()) / total;
        for (int i = 0; i < dim; ++i) {
            mu[static_cast<std::size_t>(i)] = Real(r.raw_mus()[static_cast<std::size_t>(i)]) / total;
        }
    }
    Real mu_at(int i) const { return mu[static_cast<std::size_t>(i - 1)]; }
    Real rho(int i) const { return lambda / mu_at(i); }

    int dim;
    Real lambda;
    std::array<Real, 3> mu{};
};

}  // namespace tandemq
