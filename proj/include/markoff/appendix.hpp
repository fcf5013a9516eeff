#pragma once

// Summation identities for neighbor-trace fans: with y_n = Aλⁿ + Bλ⁻ⁿ,
//   Σ_{n≥0} 1/(y_n y_{n+1}) = 1/(A(A+B)(λ−λ⁻¹))
//   Σ_{n∈Z} 1/(y_n y_{n+1}) = 1/(AB(λ−λ⁻¹))
// together with the parametrization of the fan around a region of trace x
// and the vertex-fan closed form used by the tri-colored identity.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "markoff/identities.hpp"

namespace markoff {

struct GeometricPair {
    cplx lambda;  // |lambda| > 1
    cplx A;       // nonzero
    cplx B;       // nonzero
};

inline GeometricPair make_geometric_pair(cplx lambda, cplx A, cplx B) {
    if (std::abs(lambda) <= 1.0)
        throw std::invalid_argument("geometric pair needs |lambda| > 1");
    if (A == 0.0 || B == 0.0)
        throw std::invalid_argument("geometric pair needs A, B != 0");
    return {lambda, A, B};
}

// Integer power by repeated squaring (tighter rounding than polar pow).
inline cplx cpow_int(cplx base, long n) {
    if (n < 0) return 1.0 / cpow_int(base, -n);
    cplx acc = 1.0;
    while (n > 0) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

inline cplx y_n(const GeometricPair& g, long n) {
    return g.A * cpow_int(g.lambda, n) + g.B * cpow_int(g.lambda, -n);
}

// Σ_{n≥0} 1/(y_n y_{n+1}).
inline cplx one_sided_closed(const GeometricPair& g) {
    cplx apb = g.A + g.B;
    if (std::abs(apb) == 0.0)
        throw std::domain_error("one-sided closed form has a pole at A + B = 0 (y_0 = 0)");
    return 1.0 / (g.A * apb * (g.lambda - 1.0 / g.lambda));
}

// Σ_{n∈Z} 1/(y_n y_{n+1}); equals one_sided(A,B) + one_sided(B,A).
inline cplx two_sided_closed(const GeometricPair& g) {
    return 1.0 / (g.A * g.B * (g.lambda - 1.0 / g.lambda));
}

// Literal Σ_{n=n_min}^{n_max} 1/(y_n y_{n+1}): the independent oracle.
inline cplx partial_sum_oracle(const GeometricPair& g, long n_min, long n_max) {
    if (n_min > n_max) throw std::invalid_argument("oracle needs n_min <= n_max");
    cplx sum = 0.0;
    cplx prev = y_n(g, n_min);
    if (prev == 0.0) throw std::domain_error("y_n vanishes at n = " + std::to_string(n_min));
    for (long n = n_min; n <= n_max; ++n) {
        cplx next = y_n(g, n + 1);
        if (next == 0.0) throw std::domain_error("y_n vanishes at n = " + std::to_string(n + 1));
        sum += 1.0 / (prev * next);
        prev = next;
    }
    return sum;
}

// Fan parametrization around a region of trace x: λ + λ⁻¹ = x with |λ| > 1,
// and A, B fitted to two consecutive neighbor traces y0, y1. The vertex
// relation forces A·B = (x² − μ)/(x² − 4).
inline GeometricPair neighbor_parameters(cplx x, cplx y0, cplx y1, cplx /*mu*/ = 0.0) {
    if (dist_to_real_segment(x) <= 1e-12)
        throw std::domain_error("neighbor fan undefined for x on [-2, 2] (|lambda| = 1)");
    cplx root = sqrt_principal(1.0 - 4.0 / (x * x));
    cplx lambda = x / 2.0 * (1.0 + root);
    if (std::abs(lambda) < 1.0) lambda = x / 2.0 * (1.0 - root);  // restore |λ| > 1
    cplx lam_inv = 1.0 / lambda;
    cplx denom = lambda - lam_inv;
    cplx A = (y1 - y0 * lam_inv) / denom;
    cplx B = y0 - A;
    if (A == 0.0 || B == 0.0)
        throw std::domain_error("degenerate fan: one geometric component vanishes");
    return {lambda, A, B};
}

// Σ over the fan vertices of μ/(x y_n y_{n+1}) = (μ/(x²−μ))·√(1−4/x²);
// computed from the closed form, with (μ/x)·two_sided_closed as the second
// algebraic route (both are compared in the tests).
inline cplx vertex_fan_sum(cplx x, const GeometricPair& /*g*/, cplx mu) {
    cplx x2 = x * x;
    if (std::abs(x2 - mu) <= 1e-12 * std::max(1.0, std::norm(x)))
        throw std::domain_error("vertex fan sum has a pole at x² = μ");
    return mu / (x2 - mu) * sqrt_principal(1.0 - 4.0 / x2);
}

inline cplx vertex_fan_sum_via_prop41(cplx x, const GeometricPair& g, cplx mu) {
    return mu / x * two_sided_closed(g);
}

}  // namespace markoff
