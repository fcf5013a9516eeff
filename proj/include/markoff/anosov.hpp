#pragma once

// Integer 2x2 matrices acting on slopes: the mapping-class action on curves.
// Anosov classes (|trace| > 2, det ±1) act with no periodic slopes; orbit
// representatives are deduplicated through a finite orbit window.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "markoff/farey.hpp"
#include "markoff/slope.hpp"

namespace markoff {

struct IntegerMatrix2 {
    std::int64_t a = 1, b = 0, c = 0, d = 1;

    friend bool operator==(const IntegerMatrix2&, const IntegerMatrix2&) = default;
};

inline std::int64_t det(const IntegerMatrix2& m) {
    return checked_sub(checked_mul(m.a, m.d), checked_mul(m.b, m.c));
}

inline std::int64_t trace(const IntegerMatrix2& m) { return checked_add(m.a, m.d); }

inline IntegerMatrix2 mul(const IntegerMatrix2& m, const IntegerMatrix2& n) {
    return {checked_add(checked_mul(m.a, n.a), checked_mul(m.b, n.c)),
            checked_add(checked_mul(m.a, n.b), checked_mul(m.b, n.d)),
            checked_add(checked_mul(m.c, n.a), checked_mul(m.d, n.c)),
            checked_add(checked_mul(m.c, n.b), checked_mul(m.d, n.d))};
}

// Inverse of a unimodular matrix (det ±1).
inline IntegerMatrix2 inverse(const IntegerMatrix2& m) {
    std::int64_t dd = det(m);
    if (dd == 1) return {m.d, -m.b, -m.c, m.a};
    if (dd == -1) return {-m.d, m.b, m.c, -m.a};
    throw std::invalid_argument("matrix is not unimodular");
}

inline bool is_unimodular(const IntegerMatrix2& m) {
    std::int64_t dd = det(m);
    return dd == 1 || dd == -1;
}

inline bool is_anosov(const IntegerMatrix2& m) {
    if (!is_unimodular(m)) return false;
    std::int64_t t = trace(m);
    return t > 2 || t < -2;
}

inline void require_anosov(const IntegerMatrix2& m) {
    if (!is_anosov(m))
        throw std::invalid_argument("mapping class is not Anosov (need det ±1 and |trace| > 2)");
}

// Linear action on (s, r) as a column vector, then canonicalize.
inline Slope anosov_apply(const IntegerMatrix2& m, const Slope& x, bool require = false) {
    if (require) require_anosov(m);
    std::int64_t s = checked_add(checked_mul(m.a, x.s), checked_mul(m.b, x.r));
    std::int64_t r = checked_add(checked_mul(m.c, x.s), checked_mul(m.d, x.r));
    return normalize(s, r);
}

namespace detail {

inline double slope_complexity(const Slope& x) {
    double s = x.s < 0 ? -double(x.s) : double(x.s);
    return std::max(s, double(x.r)) + 1.0;
}

// Lexicographically minimal canonical slope on the orbit of x. Orbit entries
// shrink towards a turning point and then grow by a factor ≥ λ² per step, so
// each direction is walked until the complexity is far past the running
// minimum (or 64-bit entries would overflow; such elements cannot be minima).
inline Slope orbit_representative(const IntegerMatrix2& theta, const IntegerMatrix2& theta_inv,
                                  const Slope& x, int max_steps = 500) {
    Slope best = x;
    for (const IntegerMatrix2* dir : {&theta, &theta_inv}) {
        Slope cur = x;
        for (int k = 0; k < max_steps; ++k) {
            try {
                cur = anosov_apply(*dir, cur);
            } catch (const overflow_error&) {
                break;
            }
            if (canonical_less(cur, best)) best = cur;
            if (slope_complexity(cur) > 1e6 * slope_complexity(best)) break;
        }
    }
    return best;
}

}  // namespace detail

// One representative per θ-orbit among regions_within(depth, root): the
// lexicographically minimal canonical slope of the orbit.
inline std::vector<Slope> orbit_representatives(const IntegerMatrix2& theta, int depth,
                                                const TreeVertex& root = root_vertex()) {
    require_anosov(theta);
    IntegerMatrix2 theta_inv = inverse(theta);
    std::map<Slope, bool, SlopeCanonicalLess> reps;
    for (const Slope& x : regions_within(depth, root))
        reps.emplace(detail::orbit_representative(theta, theta_inv, x), true);
    std::vector<Slope> out;
    out.reserve(reps.size());
    for (const auto& [rep, unused] : reps) out.push_back(rep);
    return out;
}

}  // namespace markoff
