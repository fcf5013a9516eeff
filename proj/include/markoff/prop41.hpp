#pragma once

// Seeded property suite for the fan summation identities: random geometric
// pairs compared against literal partial sums, plus the exact hand case
// λ = 2, A = B = 1. Draws whose floating-point summation error cannot reach
// the 1e-12 gate (near-cancelling y_n, oversized values) are resampled.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "markoff/appendix.hpp"

namespace markoff {

struct Prop41Row {
    GeometricPair pair;
    double dev_one_sided = 0.0;   // |closed − 200-term oracle|
    double dev_two_sided = 0.0;   // |closed − 400-term oracle|
    double dev_reflection = 0.0;  // |two − one(A,B) − one(B,A)| / max(1, |two|)
};

struct Prop41Report {
    std::uint64_t rng_seed = 0;
    int trials = 0;
    long rejected_draws = 0;
    std::vector<Prop41Row> rows;
    double max_dev_one_sided = 0.0;
    double max_dev_two_sided = 0.0;
    double max_dev_reflection = 0.0;
    double hand_dev_one_sided = 0.0;  // λ=2, A=B=1 against exactly 1/3
    double hand_dev_two_sided = 0.0;  // and 2/3
    bool pass = false;
};

namespace detail {

// Estimated absolute roundoff of the two oracle sums for this draw; the
// dominant piece is cancellation in y_n (relative error ~ eps·s_n/|y_n| with
// s_n the no-cancellation magnitude).
inline double prop41_error_budget(const GeometricPair& g) {
    const double eps = 2e-15;
    double mod_l = std::abs(g.lambda);
    double mod_a = std::abs(g.A), mod_b = std::abs(g.B);
    double budget = 0.0;
    double prev_y = 0.0, prev_rel = 0.0;
    for (long n = -201; n <= 201; ++n) {
        double ln = std::pow(mod_l, double(n));
        double s = mod_a * ln + mod_b / ln;
        double yn = std::abs(y_n(g, n));
        if (yn < 1e-300) return 1e9;
        double rel = eps * s / yn;
        if (n > -201) budget += (prev_rel + rel) / (prev_y * yn);
        prev_y = yn;
        prev_rel = rel;
    }
    return budget;
}

}  // namespace detail

inline Prop41Report run_prop41(int trials, std::uint64_t rng_seed) {
    if (trials < 1) throw std::invalid_argument("prop41 needs at least one trial");
    Prop41Report rep;
    rep.rng_seed = rng_seed;
    rep.trials = trials;

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> mod_lambda(1.1, 10.0);
    std::uniform_real_distribution<double> mod_coeff(0.1, 10.0);
    std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);

    auto draw_cplx = [&](double mod) { double p = phase(rng); return std::polar(mod, p); };

    rep.rows.reserve(std::size_t(trials));
    for (int t = 0; t < trials; ++t) {
        GeometricPair g{};
        for (long attempt = 0;; ++attempt) {
            if (attempt > 100000) throw std::runtime_error("prop41 sampler failed to accept a draw");
            g.lambda = draw_cplx(mod_lambda(rng));
            g.A = draw_cplx(mod_coeff(rng));
            g.B = draw_cplx(mod_coeff(rng));
            if (std::abs(g.A + g.B) < 1e-6) { ++rep.rejected_draws; continue; }
            double v1 = std::abs(one_sided_closed(g));
            double v1s = std::abs(one_sided_closed({g.lambda, g.B, g.A}));
            double v2 = std::abs(two_sided_closed(g));
            if (std::max({v1, v1s, v2}) > 5.0) { ++rep.rejected_draws; continue; }
            if (detail::prop41_error_budget(g) > 2e-13) { ++rep.rejected_draws; continue; }
            break;
        }
        Prop41Row row;
        row.pair = g;
        cplx one = one_sided_closed(g);
        cplx one_swapped = one_sided_closed({g.lambda, g.B, g.A});
        cplx two = two_sided_closed(g);
        row.dev_one_sided = std::abs(one - partial_sum_oracle(g, 0, 199));
        row.dev_two_sided = std::abs(two - partial_sum_oracle(g, -200, 199));
        row.dev_reflection = std::abs(two - one - one_swapped) / std::max(1.0, std::abs(two));
        rep.rows.push_back(row);
        rep.max_dev_one_sided = std::max(rep.max_dev_one_sided, row.dev_one_sided);
        rep.max_dev_two_sided = std::max(rep.max_dev_two_sided, row.dev_two_sided);
        rep.max_dev_reflection = std::max(rep.max_dev_reflection, row.dev_reflection);
    }

    GeometricPair hand{cplx(2.0), cplx(1.0), cplx(1.0)};
    rep.hand_dev_one_sided = std::abs(one_sided_closed(hand) - cplx(1.0 / 3.0));
    rep.hand_dev_two_sided = std::abs(two_sided_closed(hand) - cplx(2.0 / 3.0));

    rep.pass = rep.max_dev_one_sided <= 1e-12 && rep.max_dev_two_sided <= 1e-12 &&
               rep.max_dev_reflection <= 1e-14 && rep.hand_dev_one_sided <= 1e-14 &&
               rep.hand_dev_two_sided <= 1e-14;
    return rep;
}

}  // namespace markoff
