#pragma once

// SL(2,C) matrix pairs: a Markoff map is the trace function of a pair
// (ρ(a), ρ(b)); the lift solves for such a pair from the seed traces.

#include <complex>
#include <stdexcept>

#include "markoff/identities.hpp"
#include "markoff/markoff_map.hpp"

namespace markoff {

struct Mat2c {
    cplx a{1}, b{0}, c{0}, d{1};

    cplx trace() const { return a + d; }
    cplx det() const { return a * d - b * c; }
};

inline Mat2c mul(const Mat2c& m, const Mat2c& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

// Inverse of a determinant-1 matrix.
inline Mat2c inverse_sl2(const Mat2c& m) { return {m.d, -m.b, -m.c, m.a}; }

struct MatrixPair {
    Mat2c A, B;
};

class reducible_error : public std::domain_error {
public:
    explicit reducible_error(const std::string& what) : std::domain_error(what) {}
};

inline cplx commutator_trace(const MatrixPair& p) {
    return mul(mul(p.A, p.B), mul(inverse_sl2(p.A), inverse_sl2(p.B))).trace();
}

// Seed (tr A, tr B, tr AB); the resulting μ equals tr(ABA⁻¹B⁻¹) + 2.
inline MarkoffMap from_matrices(const MatrixPair& p) {
    if (std::abs(p.A.det() - 1.0) > 1e-12 || std::abs(p.B.det() - 1.0) > 1e-12)
        throw std::invalid_argument("matrix pair must have determinant 1");
    return MarkoffMap::from_seed(p.A.trace(), p.B.trace(), mul(p.A, p.B).trace());
}

// A pair (A, B) with tr A = x, tr B = y, tr AB = z. A is the companion
// matrix of x; B is solved from tr B, tr AB and det B = 1 with the free
// entry c fixed to 1 and the quadratic branch chosen by the principal root.
// μ = 4 characters are reducible (every realizing pair commutes) and are
// rejected.
inline MatrixPair lift_to_matrices(cplx x, cplx y, cplx z) {
    cplx mu = markoff_mu(x, y, z);
    if (std::abs(mu - 4.0) <= 1e-10)
        throw reducible_error("character is reducible (mu = 4); no irreducible lift exists");
    Mat2c A{x, -1.0, 1.0, 0.0};
    // B = [[a, b],[c, d]], c = 1:  a + d = y,  xa + b − c = z,  ad − bc = 1
    // ⇒ a² − (y + x)a + (z + 2) = 0
    cplx half_sum = (y + x) / 2.0;
    cplx disc = half_sum * half_sum - (z + 2.0);
    cplx a = half_sum + sqrt_principal(disc);
    cplx d = y - a;
    cplx b = z - x * a + 1.0;
    MatrixPair p{A, Mat2c{a, b, 1.0, d}};
    if (std::abs(p.B.det() - 1.0) > 1e-9)
        throw std::domain_error("lift solver produced a singular B (degenerate character)");
    return p;
}

}  // namespace markoff
