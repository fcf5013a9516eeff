#pragma once

// μ-Markoff maps φ: Ω → C obeying x² + y² + z² − xyz = μ at vertices and
// xy = z + w across edges. Traces are evaluated by walking the unique tree
// path from the root and memoized per canonical slope. Magnitudes above
// 1e150 are flagged "escaped" instead of propagating infinities.

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "markoff/farey.hpp"
#include "markoff/slope.hpp"

namespace markoff {

using cplx = std::complex<double>;

inline constexpr double kEscapeMagnitude = 1e150;

class escape_error : public std::runtime_error {
public:
    explicit escape_error(const std::string& what) : std::runtime_error(what) {}
};

struct MarkoffTriple {
    cplx x, y, z;
    cplx mu;
};

inline cplx markoff_mu(cplx x, cplx y, cplx z) { return x * x + y * y + z * z - x * y * z; }

inline MarkoffTriple make_triple(cplx x, cplx y, cplx z) {
    return {x, y, z, markoff_mu(x, y, z)};
}

enum class TripleIndex { x = 0, y = 1, z = 2 };

// Replace one coordinate c by (product of the other two) − c; μ is unchanged.
inline MarkoffTriple vieta_flip(const MarkoffTriple& t, TripleIndex which) {
    MarkoffTriple out = t;
    switch (which) {
        case TripleIndex::x: out.x = t.y * t.z - t.x; break;
        case TripleIndex::y: out.y = t.x * t.z - t.y; break;
        case TripleIndex::z: out.z = t.x * t.y - t.z; break;
    }
    return out;
}

class MarkoffMap {
public:
    // Root regions {0/1, 1/0, 1/1} carry (x, y, z); μ is computed, not given.
    static MarkoffMap from_seed(cplx x, cplx y, cplx z) { return MarkoffMap(x, y, z); }

    static MarkoffMap from_triple(const MarkoffTriple& t) { return MarkoffMap(t.x, t.y, t.z); }

    cplx mu() const { return mu_; }
    cplx peripheral_trace() const { return mu_ - 2.0; }
    const TreeVertex& root() const { return root_; }
    MarkoffTriple seed() const { return {seed_x_, seed_y_, seed_z_, mu_}; }

    // φ(X); throws escape_error when the walk runs through escaped values.
    cplx trace(const Slope& x) {
        ensure(x);
        auto it = values_.find(x);
        if (it == values_.end())
            throw escape_error("trace at " + to_string(x) + " escaped (|φ| > 1e150)");
        return it->second;
    }

    // φ(X) or nullopt when escaped.
    std::optional<cplx> try_trace(const Slope& x) {
        ensure(x);
        auto it = values_.find(x);
        if (it == values_.end()) return std::nullopt;
        if (escaped_.count(x)) return std::nullopt;
        return it->second;
    }

    bool is_escaped(const Slope& x) {
        ensure(x);
        return escaped_.count(x) != 0 || values_.find(x) == values_.end();
    }

    std::size_t cache_size() const { return values_.size(); }

private:
    MarkoffMap(cplx x, cplx y, cplx z)
        : root_(root_vertex()), seed_x_(x), seed_y_(y), seed_z_(z), mu_(markoff_mu(x, y, z)) {
        store(Slope{0, 1}, x);
        store(Slope{1, 0}, y);
        store(Slope{1, 1}, z);
    }

    void store(const Slope& slope, cplx value) {
        values_.emplace(slope, value);
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag()) ||
            std::abs(value) > kEscapeMagnitude)
            escaped_.insert(slope);
    }

    bool known(const Slope& slope) const {
        return values_.count(slope) != 0 || escaped_.count(slope) != 0;
    }

    // Walk the unique tree path from the root towards `target`, filling the
    // cache by the edge relation w = xy − z. Evaluation order along the path
    // is forced by the tree, so cached results are bit-stable across query
    // orders.
    void ensure(const Slope& target) {
        if (known(target)) return;
        TreeVertex cur = root_;
        while (true) {
            int i = step_towards(cur, target);
            if (i < 0) return;
            VertexStep st = cross_edge(cur, i);
            if (!known(st.added)) {
                const Slope& f1 = cur.regions[(i + 1) % 3];
                const Slope& f2 = cur.regions[(i + 2) % 3];
                auto va = values_.find(f1);
                auto vb = values_.find(f2);
                auto vo = values_.find(st.removed);
                bool flanks_ok = va != values_.end() && vb != values_.end() &&
                                 vo != values_.end() && !escaped_.count(f1) && !escaped_.count(f2);
                if (!flanks_ok) {
                    // beyond an escaped flank every deeper value escapes too
                    escaped_.insert(st.added);
                } else {
                    store(st.added, va->second * vb->second - vo->second);
                }
            }
            cur = st.vertex;
        }
    }

    TreeVertex root_;
    cplx seed_x_, seed_y_, seed_z_;
    cplx mu_;
    std::unordered_map<Slope, cplx, SlopeHash> values_;
    std::unordered_set<Slope, SlopeHash> escaped_;
};

}  // namespace markoff
