#include "tandemq/exactsolve.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include <Eigen/Dense>

#include "tandemq/errors.hpp"
#include "tandemq/harmonic.hpp"

namespace tandemq {

template <class Real>
BasicGridField<Real>::BasicGridField(std::int64_t n) : n_(n) {
    if (n < 1) throw DomainError("buffer size n must be positive");
    const auto rows = static_cast<std::size_t>(n + 1);
    values_.assign(rows * (rows + 1) / 2, Real(0));
}

template <class Real>
std::size_t BasicGridField<Real>::index(std::int64_t x1, std::int64_t x2) const {
    if (!contains(x1, x2)) {
        throw DomainError("point (" + std::to_string(x1) + "," + std::to_string(x2) +
                          ") is outside A_" + std::to_string(n_));
    }
    // Row x1 holds x2 = 0..n-x1; rows before it hold sum_{i<x1} (n+1-i) entries.
    const auto offset = x1 * (n_ + 1) - x1 * (x1 - 1) / 2;
    return static_cast<std::size_t>(offset + x2);
}

template class BasicGridField<double>;
template class BasicGridField<Quad>;

namespace {

void require_2d(const Rates& r) {
    if (r.dim() != 2) throw DomainError("the exact solver handles two stations");
}

template <class Real>
double to_double(const Real& v) {
    return static_cast<double>(v);
}

}  // namespace

template <class Real>
BasicGridField<Real> solve_pn_as(const Rates& r, std::int64_t n, const SolveOptions& opts) {
    using std::abs;
    require_2d(r);
    BasicGridField<Real> v(n);
    for (std::int64_t x1 = 0; x1 <= n; ++x1) v.at(x1, n - x1) = Real(1);

    const RatesAs<Real> q(r);
    const Real lam = q.lambda;
    const Real mu1 = q.mu_at(1);
    const Real mu2 = q.mu_at(2);
    // Denominators 1 - (frozen mass) for the three boundary cases.
    const Real keep_x1_axis = Real(1) - mu1;  // x1 == 0: service 1 frozen
    const Real keep_x2_axis = Real(1) - mu2;  // x2 == 0: service 2 frozen

    auto update = [&](std::int64_t x1, std::int64_t x2) -> Real {
        Real acc = lam * v.at(x1 + 1, x2);
        if (x1 > 0 && x2 > 0) {
            return acc + mu1 * v.at(x1 - 1, x2 + 1) + mu2 * v.at(x1, x2 - 1);
        }
        if (x1 > 0) return (acc + mu1 * v.at(x1 - 1, x2 + 1)) / keep_x2_axis;
        return (acc + mu2 * v.at(x1, x2 - 1)) / keep_x1_axis;  // x1 == 0, x2 > 0
    };

    const bool descending = opts.order == SweepOrder::DecreasingPopulation;
    double worst = 0.0;
    for (std::size_t sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        Real max_rel(0);
        auto visit = [&](std::int64_t x1, std::int64_t x2) {
            Real& cell = v.at(x1, x2);
            const Real next = update(x1, x2);
            if (next != cell) {
                const Real rel = next == Real(0) ? Real(1) : abs(next - cell) / abs(next);
                if (rel > max_rel) max_rel = rel;
            }
            cell = next;
        };
        if (descending) {
            for (std::int64_t s = n - 1; s >= 1; --s) {
                for (std::int64_t x1 = s; x1 >= 0; --x1) visit(x1, s - x1);
            }
        } else {
            for (std::int64_t s = 1; s <= n - 1; ++s) {
                for (std::int64_t x1 = 0; x1 <= s; ++x1) visit(x1, s - x1);
            }
        }
        worst = to_double(max_rel);
        if (sweep >= 2 && worst < opts.tol) {
            v.sweeps = sweep;
            v.last_update = worst;
            return v;
        }
        if (n == 1) {  // no interior states
            v.sweeps = sweep;
            return v;
        }
    }
    throw NotConverged(opts.max_sweeps, worst);
}

template BasicGridField<double> solve_pn_as<double>(const Rates&, std::int64_t, const SolveOptions&);
template BasicGridField<Quad> solve_pn_as<Quad>(const Rates&, std::int64_t, const SolveOptions&);

GridField solve_pn(const Rates& r, std::int64_t n, const SolveOptions& opts) {
    return solve_pn_as<double>(r, n, opts);
}

GridField solve_pn_direct(const Rates& r, std::int64_t n) {
    require_2d(r);
    if (n > 40) throw DomainError("dense cross-check solver is limited to n <= 40");
    GridField v(n);
    for (std::int64_t x1 = 0; x1 <= n; ++x1) v.at(x1, n - x1) = 1.0;
    if (n == 1) return v;

    // Unknowns: interior states 0 < x1 + x2 < n.
    std::vector<std::pair<std::int64_t, std::int64_t>> states;
    for (std::int64_t s = 1; s < n; ++s) {
        for (std::int64_t x1 = 0; x1 <= s; ++x1) states.emplace_back(x1, s - x1);
    }
    auto unknown = [&](std::int64_t x1, std::int64_t x2) -> Eigen::Index {
        const auto s = x1 + x2;
        if (s <= 0 || s >= n) return -1;
        // Level s starts after levels 1..s-1, which hold 2 + 3 + ... + s states.
        return static_cast<Eigen::Index>((s * (s + 1)) / 2 - 1 + x1);
    };

    const auto m = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    const auto steps = transition_steps(r, WalkKind::ConstrainedX);
    for (const auto& [x1, x2] : states) {
        const Eigen::Index row = unknown(x1, x2);
        for (const auto& st : steps) {
            const auto nxt = constrained_step(WalkKind::ConstrainedX, LatticePoint{x1, x2}, st.delta);
            if (nxt.sum() == n) {
                b(row) += st.prob;
            } else if (nxt.sum() > 0) {
                a(row, unknown(nxt[0], nxt[1])) -= st.prob;
            }
        }
    }
    const Eigen::VectorXd sol = a.partialPivLu().solve(b);
    for (const auto& [x1, x2] : states) v.at(x1, x2) = sol(unknown(x1, x2));
    return v;
}

double fixed_point_residual(const Rates& r, const GridField& field) {
    require_2d(r);
    const auto n = field.n();
    const auto steps = transition_steps(r, WalkKind::ConstrainedX);
    double worst = 0.0;
    for (std::int64_t s = 1; s < n; ++s) {
        for (std::int64_t x1 = 0; x1 <= s; ++x1) {
            const LatticePoint x{x1, s - x1};
            double rhs = 0.0;
            for (const auto& st : steps) {
                rhs += st.prob * field(constrained_step(WalkKind::ConstrainedX, x, st.delta));
            }
            const double val = field(x);
            worst = std::max(worst, std::abs(val - rhs) / val);
        }
    }
    return worst;
}

void write_field_csv(std::ostream& os, const GridField& field) {
    const auto old_precision = os.precision(17);
    os << "x1,x2,value\n";
    for (std::int64_t x1 = 0; x1 <= field.n(); ++x1) {
        for (std::int64_t x2 = 0; x1 + x2 <= field.n(); ++x2) {
            os << x1 << ',' << x2 << ',' << field.at(x1, x2) << '\n';
        }
    }
    os.precision(old_precision);
}

nlohmann::json field_to_json(const GridField& field) {
    nlohmann::json pts = nlohmann::json::array();
    for (std::int64_t x1 = 0; x1 <= field.n(); ++x1) {
        for (std::int64_t x2 = 0; x1 + x2 <= field.n(); ++x2) {
            pts.push_back({x1, x2, field.at(x1, x2)});
        }
    }
    return {{"n", field.n()}, {"sweeps", field.sweeps}, {"points", pts}};
}

namespace {

void require_in_b(const LatticePoint& y) {
    for (int i = 1; i < y.dim(); ++i) {
        if (y[i] < 0) throw DomainError("limit-walk point has a negative constrained coordinate");
    }
    if (y.excess() < 0) throw DomainError("point " + y.str() + " is not in B");
}

// Values indexed by (e, y2) with e = y1 - y2; neighbours outside the box read
// as 0. The box has margin K + 1 around the start, so edge effects cannot
// reach the start within K steps.
std::vector<double> horizon_2d(const Rates& r, const LatticePoint& y, std::span<const int> ks, int kmax) {
    const double lam = r.lambda(), mu1 = r.mu(1), mu2 = r.mu(2);
    const std::int64_t ne = y.excess() + kmax + 2;
    const std::int64_t n2 = y[1] + kmax + 2;
    auto idx = [n2](std::int64_t e, std::int64_t a) { return static_cast<std::size_t>(e * n2 + a); };
    std::vector<double> cur(static_cast<std::size_t>(ne * n2), 0.0);
    for (std::int64_t a = 0; a < n2; ++a) cur[idx(0, a)] = 1.0;
    std::vector<double> nxt = cur;

    std::vector<double> out(ks.size(), 0.0);
    auto record = [&](int k) {
        for (std::size_t i = 0; i < ks.size(); ++i) {
            if (ks[i] == k) out[i] = cur[idx(y.excess(), y[1])];
        }
    };
    record(0);
    for (int k = 1; k <= kmax; ++k) {
        for (std::int64_t e = 1; e < ne; ++e) {
            for (std::int64_t a = 0; a < n2; ++a) {
                double v = lam * cur[idx(e - 1, a)];
                if (a + 1 < n2) v += mu1 * cur[idx(e, a + 1)];
                if (a > 0) {
                    if (e + 1 < ne) v += mu2 * cur[idx(e + 1, a - 1)];
                } else {
                    v += mu2 * cur[idx(e, a)];
                }
                nxt[idx(e, a)] = v;
            }
        }
        std::swap(cur, nxt);
        record(k);
    }
    return out;
}

std::vector<double> horizon_3d(const Rates& r, const LatticePoint& y, std::span<const int> ks, int kmax) {
    const double lam = r.lambda(), mu1 = r.mu(1), mu2 = r.mu(2), mu3 = r.mu(3);
    const std::int64_t ne = y.excess() + kmax + 2;
    const std::int64_t n2 = y[1] + kmax + 2;
    const std::int64_t n3 = y[2] + kmax + 2;
    auto idx = [n2, n3](std::int64_t e, std::int64_t a, std::int64_t b) {
        return static_cast<std::size_t>((e * n2 + a) * n3 + b);
    };
    std::vector<double> cur(static_cast<std::size_t>(ne * n2 * n3), 0.0);
    for (std::int64_t a = 0; a < n2; ++a) {
        for (std::int64_t b = 0; b < n3; ++b) cur[idx(0, a, b)] = 1.0;
    }
    std::vector<double> nxt = cur;

    std::vector<double> out(ks.size(), 0.0);
    auto record = [&](int k) {
        for (std::size_t i = 0; i < ks.size(); ++i) {
            if (ks[i] == k) out[i] = cur[idx(y.excess(), y[1], y[2])];
        }
    };
    record(0);
    for (int k = 1; k <= kmax; ++k) {
        for (std::int64_t e = 1; e < ne; ++e) {
            for (std::int64_t a = 0; a < n2; ++a) {
                for (std::int64_t b = 0; b < n3; ++b) {
                    const double self = cur[idx(e, a, b)];
                    double v = lam * cur[idx(e - 1, a, b)];
                    if (a + 1 < n2) v += mu1 * cur[idx(e, a + 1, b)];
                    if (a > 0) {
                        if (b + 1 < n3) v += mu2 * cur[idx(e, a - 1, b + 1)];
                    } else {
                        v += mu2 * self;
                    }
                    if (b > 0) {
                        if (e + 1 < ne) v += mu3 * cur[idx(e + 1, a, b - 1)];
                    } else {
                        v += mu3 * self;
                    }
                    nxt[idx(e, a, b)] = v;
                }
            }
        }
        std::swap(cur, nxt);
        record(k);
    }
    return out;
}

}  // namespace

std::vector<double> horizon_dp_sequence(const Rates& r, const LatticePoint& y,
                                        std::span<const int> horizons) {
    if (y.dim() != r.dim()) throw DomainError("point and rates differ in dimension");
    require_in_b(y);
    int kmax = 0;
    for (int k : horizons) {
        if (k < 0) throw DomainError("horizon must be nonnegative");
        kmax = std::max(kmax, k);
    }
    if (y.excess() == 0) return std::vector<double>(horizons.size(), 1.0);
    return r.dim() == 2 ? horizon_2d(r, y, horizons, kmax) : horizon_3d(r, y, horizons, kmax);
}

double horizon_dp(const Rates& r, const LatticePoint& y, int horizon) {
    const int ks[] = {horizon};
    return horizon_dp_sequence(r, y, ks).front();
}

std::vector<ConvergenceRow> convergence_to_limit(const Rates& r, const LatticePoint& y,
                                                 std::span<const std::int64_t> ns) {
    if (r.dim() != 2 || y.dim() != 2) throw DomainError("convergence_to_limit handles two stations");
    require_in_b(y);
    const Quad w = w_star_2d_as<Quad>(r, y);
    SolveOptions opts;
    opts.tol = 1e-30;
    std::vector<ConvergenceRow> rows;
    for (auto n : ns) {
        if (n <= y[0]) throw DomainError("each n must exceed y1");
        const auto field = solve_pn_as<Quad>(r, n, opts);
        const Quad p = field(transform_tn(n, y));
        rows.push_back({n, static_cast<double>(p), static_cast<double>(w),
                        static_cast<double>(abs(p - w))});
    }
    return rows;
}

}  // namespace tandemq
