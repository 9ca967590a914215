#include "tandemq/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "tandemq/errors.hpp"
#include "tandemq/harmonic.hpp"
#include "tandemq/numeric.hpp"

namespace tandemq {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct Tally {
    std::uint64_t hits = 0;
    std::uint64_t escapes = 0;
};

// Splits [0, paths) into contiguous blocks, one per worker. Tallies are
// integers, so the sum does not depend on the split.
template <class PathFn>
Tally run_paths(std::uint64_t paths, unsigned workers, PathFn&& path) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(paths, 1)));
    std::vector<Tally> tallies(workers);
    auto block = [&](unsigned w) {
        const std::uint64_t lo = paths * w / workers;
        const std::uint64_t hi = paths * (w + 1) / workers;
        Tally t;
        for (std::uint64_t i = lo; i < hi; ++i) {
            switch (path(i)) {
                case 1: ++t.hits; break;
                case 2: ++t.escapes; break;
                default: break;
            }
        }
        tallies[w] = t;
    };
    if (workers == 1) {
        block(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(block, w);
    }
    Tally total;
    for (const auto& t : tallies) {
        total.hits += t.hits;
        total.escapes += t.escapes;
    }
    return total;
}

Estimate finish(const SimConfig& cfg, const Tally& t) {
    Estimate e;
    e.paths = cfg.paths;
    e.seed = cfg.seed;
    e.hits = t.hits;
    e.escapes = t.escapes;
    e.p_hat = static_cast<double>(t.hits) / static_cast<double>(cfg.paths);
    e.std_err = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(cfg.paths));
    e.unstable_rates = !cfg.rates.stable();
    return e;
}

// Index of the event drawn from u: 0 arrival, i service at station i.
int pick_event(const std::vector<double>& cumulative, double u) {
    int k = 0;
    while (k + 1 < static_cast<int>(cumulative.size()) && u >= cumulative[static_cast<std::size_t>(k)]) ++k;
    return k;
}

std::vector<double> cumulative_probs(const Rates& r) {
    std::vector<double> c;
    double acc = r.lambda();
    c.push_back(acc);
    for (int i = 1; i <= r.dim(); ++i) {
        acc += r.mu(i);
        c.push_back(acc);
    }
    c.back() = 1.0;
    return c;
}

}  // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t path_index) noexcept
    : state_(mix64(seed + kGolden) ^ mix64(path_index * kGolden + 0x632BE59BD9B4E019ULL)) {}

PathRng::result_type PathRng::operator()() noexcept {
    state_ += kGolden;
    return mix64(state_);
}

nlohmann::json Estimate::to_json() const {
    return {{"p_hat", p_hat},         {"std_err", std_err},     {"hits", hits},
            {"escapes", escapes},     {"paths", paths},         {"seed", seed},
            {"bias_bound", bias_bound}, {"unstable_rates", unstable_rates},
            {"ci95", {ci95_low(), ci95_high()}}};
}

Estimate simulate_pn(const SimConfig& cfg) {
    if (cfg.kind != WalkKind::ConstrainedX) throw DomainError("simulate_pn runs the constrained walk X");
    if (cfg.paths < 1) throw DomainError("need at least one path");
    const auto& r = cfg.rates;
    const int d = r.dim();
    if (cfg.start.dim() != d) throw DomainError("start point and rates differ in dimension");
    if (cfg.buffer_n < 1) throw DomainError("buffer size n must be positive");
    for (int i = 0; i < d; ++i) {
        if (cfg.start[i] < 0) throw DomainError("start must be in the nonnegative orthant");
    }
    if (cfg.start.sum() > cfg.buffer_n) throw DomainError("start lies outside A_n");

    const auto cum = cumulative_probs(r);
    const auto n = cfg.buffer_n;
    auto path = [&](std::uint64_t i) -> int {
        PathRng rng(cfg.seed, i);
        std::array<std::int64_t, 3> x{cfg.start[0], cfg.start[1], d == 3 ? cfg.start[2] : 0};
        std::int64_t total = cfg.start.sum();
        while (true) {
            if (total == n) return 1;
            if (total == 0) return 0;
            const int ev = pick_event(cum, rng.uniform());
            if (ev == 0) {
                ++x[0];
                ++total;
            } else {
                const auto s = static_cast<std::size_t>(ev - 1);
                if (x[s] > 0) {
                    --x[s];
                    if (ev < d) {
                        ++x[s + 1];
                    } else {
                        --total;
                    }
                }
            }
        }
    };
    Estimate e = finish(cfg, run_paths(cfg.paths, cfg.workers, path));
    return e;
}

double escape_bias_bound(const Rates& r, std::int64_t escape_gap) {
    if (!r.stable()) return 1.0;
    if (r.dim() == 2) {
        // W* along the face is rho2^N + c rho1^{y2} (rho1^N - rho2^N): monotone
        // in y2, so the sup is at y2 = 0 or the y2 -> inf limit rho2^N.
        double sup = ipow(r.rho(2), escape_gap);
        for (std::int64_t y2 = 0; y2 <= escape_gap; ++y2) {
            sup = std::max(sup, w_star(r, LatticePoint{y2 + escape_gap, y2}));
        }
        return sup;
    }
    if (r.nearly_equal(1, 2) || r.nearly_equal(1, 3) || r.nearly_equal(2, 3)) {
        return ipow(std::max({r.rho(1), r.rho(2), r.rho(3)}), escape_gap);
    }
    double sup = ipow(r.rho(3), escape_gap);
    for (std::int64_t a = 0; a <= 2 * escape_gap; ++a) {
        for (std::int64_t b = 0; b <= 2 * escape_gap; ++b) {
            sup = std::max(sup, w_star_3d(r, LatticePoint{escape_gap + a + b, a, b}));
        }
    }
    return sup;
}

Estimate simulate_y_hit(const SimConfig& cfg) {
    if (cfg.kind != WalkKind::LimitY) throw DomainError("simulate_y_hit runs the limit walk Y");
    if (cfg.paths < 1) throw DomainError("need at least one path");
    const auto& r = cfg.rates;
    const int d = r.dim();
    if (cfg.start.dim() != d) throw DomainError("start point and rates differ in dimension");
    for (int i = 1; i < d; ++i) {
        if (cfg.start[i] < 0) throw DomainError("start has a negative constrained coordinate");
    }
    const auto e0 = cfg.start.excess();
    if (e0 < 0) throw DomainError("start lies outside B");
    if (cfg.escape_gap < 1 || cfg.escape_gap <= e0) {
        throw DomainError("escape gap must exceed the start's distance from the diagonal");
    }

    const auto cum = cumulative_probs(r);
    const auto gap = cfg.escape_gap;
    auto path = [&](std::uint64_t i) -> int {
        PathRng rng(cfg.seed, i);
        // Track e = y1 - y2 - ... and the constrained coordinates.
        std::int64_t e = e0;
        std::array<std::int64_t, 3> y{0, cfg.start[1], d == 3 ? cfg.start[2] : 0};
        while (true) {
            if (e == 0) return 1;
            if (e == gap) return 2;
            const int ev = pick_event(cum, rng.uniform());
            if (ev == 0) {
                --e;
            } else if (ev == 1) {
                ++y[1];  // (1,1[,0]): e unchanged
            } else {
                // station ev >= 2 holds coordinate ev - 1 (0-based)
                const auto s = static_cast<std::size_t>(ev - 1);
                if (y[s] > 0) {
                    --y[s];
                    if (ev < d) {
                        ++y[s + 1];  // (0,-1,1): e unchanged
                    } else {
                        ++e;  // last station: customer leaves, e grows
                    }
                }
            }
        }
    };
    Estimate est = finish(cfg, run_paths(cfg.paths, cfg.workers, path));
    est.bias_bound = escape_bias_bound(r, gap);
    return est;
}

Estimate simulate(const SimConfig& cfg) {
    return cfg.kind == WalkKind::ConstrainedX ? simulate_pn(cfg) : simulate_y_hit(cfg);
}

}  // namespace tandemq
