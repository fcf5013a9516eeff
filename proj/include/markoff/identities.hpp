#pragma once

// The h-functions and edge values behind the trace identities, plus the
// z-branch formula. Pure complex arithmetic; the square root is always the
// principal branch with Re ≥ 0 and the +i side on the negative real axis.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "markoff/farey.hpp"
#include "markoff/markoff_map.hpp"
#include "markoff/slope.hpp"

namespace markoff {

enum class HDomain {
    ok,
    on_real_segment,  // x ∈ [−2, 2] ⊂ R
    at_sqrt_mu,       // x² = μ
    at_zero,          // x = 0
};

class h_domain_error : public std::domain_error {
public:
    h_domain_error(HDomain which, const std::string& what)
        : std::domain_error(what), which_(which) {}
    HDomain which() const { return which_; }

private:
    HDomain which_;
};

// Branch with Re ≥ 0; on the imaginary axis (negative real inputs) the +i
// side is chosen, regardless of the sign of a zero imaginary part.
inline cplx sqrt_principal(cplx w) {
    if (w.imag() == 0.0) w = cplx(w.real(), 0.0);  // collapse -0.0
    cplx r = std::sqrt(w);
    if (r.real() < 0.0) r = -r;
    if (r.real() == 0.0 && r.imag() < 0.0) r = -r;
    return r;
}

// Distance from x to the real segment [−2, 2].
inline double dist_to_real_segment(cplx x) {
    double re = x.real(), im = x.imag();
    if (re >= -2.0 && re <= 2.0) return std::abs(im);
    double dre = re > 2.0 ? re - 2.0 : -2.0 - re;
    return std::hypot(dre, im);
}

inline HDomain h_domain_check(cplx x, cplx mu, double tol = 1e-12) {
    if (std::abs(x) <= tol) return HDomain::at_zero;
    if (dist_to_real_segment(x) <= tol) return HDomain::on_real_segment;
    if (std::abs(x * x - mu) <= tol * std::max(1.0, std::norm(x))) return HDomain::at_sqrt_mu;
    return HDomain::ok;
}

namespace detail {

// h_{μ,p} without domain checks; h_μ is the p = 1/3 case.
inline cplx h_weighted_value(cplx x, cplx mu, cplx p) {
    cplx x2 = x * x;
    return 0.5 * (1.0 - (x2 - (1.0 - p) * mu) / (x2 - mu) * sqrt_principal(1.0 - 4.0 / x2));
}

inline void h_domain_require(cplx x, cplx mu) {
    switch (h_domain_check(x, mu)) {
        case HDomain::ok: return;
        case HDomain::at_zero: throw h_domain_error(HDomain::at_zero, "h_mu undefined at x = 0");
        case HDomain::on_real_segment:
            throw h_domain_error(HDomain::on_real_segment, "h_mu undefined on [-2, 2]");
        case HDomain::at_sqrt_mu:
            throw h_domain_error(HDomain::at_sqrt_mu, "h_mu undefined at x = ±sqrt(mu)");
    }
}

}  // namespace detail

inline cplx h_mu_p(cplx x, cplx mu, cplx p) {
    detail::h_domain_require(x, mu);
    return detail::h_weighted_value(x, mu, p);
}

inline cplx h_mu(cplx x, cplx mu) { return h_mu_p(x, mu, cplx(1.0 / 3.0)); }

// z-branch: the root of z² − xyz + x² + y² − μ = 0 selected by the displayed
// minus branch.
inline cplx z_branch(cplx x, cplx y, cplx mu) {
    if (x == 0.0 || y == 0.0) throw std::domain_error("z_branch needs x, y != 0");
    cplx x2 = x * x, y2 = y * y;
    cplx inner = 1.0 - 4.0 * (1.0 / x2 + 1.0 / y2 - mu / (x2 * y2));
    return x * y / 2.0 * (1.0 - sqrt_principal(inner));
}

// Weights (p1, p2, p3) with p1 + p2 + p3 = 1 for the tri-colored identity.
struct Weights {
    cplx p1{1.0 / 3.0}, p2{1.0 / 3.0}, p3{1.0 / 3.0};

    cplx for_class(ParityClass c) const {
        switch (c) {
            case ParityClass::one: return p1;
            case ParityClass::two: return p2;
            default: return p3;
        }
    }
};

inline Weights make_weights(cplx p1, cplx p2, cplx p3) {
    if (std::abs(p1 + p2 + p3 - 1.0) > 1e-12)
        throw std::invalid_argument("weights must sum to 1");
    return {p1, p2, p3};
}

namespace detail {

// Weighted edge value for ē = {X,Y; → Z} with weights picked by the parity
// classes of the flanks; the unweighted Ψ is the (1/3,1/3,1/3) case.
inline cplx weighted_psi_value(cplx x, cplx y, cplx z, cplx mu, cplx px, cplx py) {
    cplx q = z / (x * y);
    return q - (0.5 - q) * (px * mu / (x * x - mu) + py * mu / (y * y - mu));
}

inline void psi_domain_require(cplx t, cplx mu, const Slope& where) {
    if (std::abs(t) <= 1e-12)
        throw std::domain_error("edge value undefined: trace 0 at " + to_string(where));
    if (std::abs(t * t - mu) <= 1e-12 * std::max(1.0, std::norm(t)))
        throw std::domain_error("edge value undefined: trace ±sqrt(mu) at " + to_string(where));
}

}  // namespace detail

// Ψ(x, y; z) = z/(xy) − (1/3)(1/2 − z/(xy))(μ/(x²−μ) + μ/(y²−μ)) for the
// directed edge with flank traces x, y and head trace z.
inline cplx psi_edge_value(const DirectedEdge& e, MarkoffMap& m) {
    cplx x = m.trace(e.flank[0]);
    cplx y = m.trace(e.flank[1]);
    cplx z = m.trace(e.head_region);
    detail::psi_domain_require(x, m.mu(), e.flank[0]);
    detail::psi_domain_require(y, m.mu(), e.flank[1]);
    cplx third(1.0 / 3.0);
    return detail::weighted_psi_value(x, y, z, m.mu(), third, third);
}

inline cplx weighted_edge_value(const DirectedEdge& e, MarkoffMap& m, const Weights& w) {
    cplx x = m.trace(e.flank[0]);
    cplx y = m.trace(e.flank[1]);
    cplx z = m.trace(e.head_region);
    detail::psi_domain_require(x, m.mu(), e.flank[0]);
    detail::psi_domain_require(y, m.mu(), e.flank[1]);
    return detail::weighted_psi_value(x, y, z, m.mu(), w.for_class(parity_class(e.flank[0])),
                                      w.for_class(parity_class(e.flank[1])));
}

// The three weighted values on the directed edges heading towards v, ordered
// by the parity class of the head region (class 1, 2, 3). Their sum is 1.
inline std::array<cplx, 3> weighted_edge_values(const TreeVertex& v, MarkoffMap& m,
                                                const Weights& w) {
    std::array<cplx, 3> out{};
    for (int i = 0; i < 3; ++i) {
        const Slope& head = v.regions[i];
        const Slope& f1 = v.regions[(i + 1) % 3];
        const Slope& f2 = v.regions[(i + 2) % 3];
        DirectedEdge e = make_edge(f1, f2, fourth_region(f1, f2, head), head);
        out[parity_index(head) - 1] = weighted_edge_value(e, m, w);
    }
    return out;
}

}  // namespace markoff
