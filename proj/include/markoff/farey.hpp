#pragma once

// Combinatorics of the trivalent tree Σ dual to the Farey triangulation.
// Vertices are unordered triples of pairwise-neighboring slopes, edges carry
// a flank pair {X,Y} and the two end regions Z, W (the mediant and the
// difference of the flanks). All of it is pure integer arithmetic.

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>
#include <vector>

#include "markoff/slope.hpp"

namespace markoff {

struct TreeVertex {
    // sorted by canonical_less; pairwise Farey neighbors
    std::array<Slope, 3> regions;

    friend bool operator==(const TreeVertex&, const TreeVertex&) = default;
};

inline TreeVertex make_vertex(Slope a, Slope b, Slope c) {
    std::array<Slope, 3> reg{a, b, c};
    std::sort(reg.begin(), reg.end(), SlopeCanonicalLess{});
    if (reg[0] == reg[1] || reg[1] == reg[2])
        throw std::invalid_argument("tree vertex needs three distinct regions");
    if (!are_neighbors(reg[0], reg[1]) || !are_neighbors(reg[1], reg[2]) ||
        !are_neighbors(reg[0], reg[2]))
        throw std::invalid_argument("tree vertex regions must be pairwise Farey neighbors");
    return {reg};
}

// The basis convention {a, b, ab} ↔ {0/1, 1/0, 1/1}.
inline TreeVertex root_vertex() {
    return make_vertex(Slope{0, 1}, Slope{1, 0}, Slope{1, 1});
}

inline bool vertex_less(const TreeVertex& u, const TreeVertex& v) {
    for (int i = 0; i < 3; ++i) {
        if (u.regions[i] == v.regions[i]) continue;
        return canonical_less(u.regions[i], v.regions[i]);
    }
    return false;
}

// The two regions meeting the edge {X,Y} at its endpoints are the mediant
// (s1+s2)/(r1+r2) and the difference (s1−s2)/(r1−r2), up to normalization.
inline std::array<Slope, 2> edge_end_regions(const Slope& f1, const Slope& f2) {
    if (!are_neighbors(f1, f2)) throw std::invalid_argument("flank slopes are not Farey neighbors");
    Slope mediant = normalize(checked_add(f1.s, f2.s), checked_add(f1.r, f2.r));
    Slope difference = normalize(checked_sub(f1.s, f2.s), checked_sub(f1.r, f2.r));
    return {mediant, difference};
}

// Given one end region of the edge {f1, f2}, return the other.
inline Slope fourth_region(const Slope& f1, const Slope& f2, const Slope& known_end) {
    auto ends = edge_end_regions(f1, f2);
    if (known_end == ends[0]) return ends[1];
    if (known_end == ends[1]) return ends[0];
    throw std::invalid_argument("region " + to_string(known_end) +
                                " does not meet the edge {" + to_string(f1) + ", " +
                                to_string(f2) + "}");
}

// Directed edge {X,Y; Z → W}: flank {X,Y}, tail region Z, head region W.
// The edge heads towards the vertex {X,Y,W}.
struct DirectedEdge {
    std::array<Slope, 2> flank;  // sorted by canonical_less
    Slope tail_region;
    Slope head_region;

    friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

inline DirectedEdge make_edge(Slope f1, Slope f2, Slope tail, Slope head) {
    if (canonical_less(f2, f1)) std::swap(f1, f2);
    auto ends = edge_end_regions(f1, f2);
    bool ok = (tail == ends[0] && head == ends[1]) || (tail == ends[1] && head == ends[0]);
    if (!ok) throw std::invalid_argument("tail/head do not match the edge's end regions");
    return {{f1, f2}, tail, head};
}

inline DirectedEdge reverse(const DirectedEdge& e) {
    return {e.flank, e.head_region, e.tail_region};
}

inline TreeVertex head_vertex(const DirectedEdge& e) {
    return make_vertex(e.flank[0], e.flank[1], e.head_region);
}

inline TreeVertex tail_vertex(const DirectedEdge& e) {
    return make_vertex(e.flank[0], e.flank[1], e.tail_region);
}

inline bool edge_less(const DirectedEdge& a, const DirectedEdge& b) {
    if (!(a.flank[0] == b.flank[0])) return canonical_less(a.flank[0], b.flank[0]);
    if (!(a.flank[1] == b.flank[1])) return canonical_less(a.flank[1], b.flank[1]);
    if (!(a.head_region == b.head_region)) return canonical_less(a.head_region, b.head_region);
    return canonical_less(a.tail_region, b.tail_region);
}

// Index (0..2) of the region of v to replace when walking towards target,
// or -1 when target is one of v's regions. The target is behind the edge
// whose flank separates it from the opposite region.
inline int step_towards(const TreeVertex& v, const Slope& target) {
    const auto& reg = v.regions;
    for (int i = 0; i < 3; ++i)
        if (reg[i] == target) return -1;
    for (int i = 0; i < 3; ++i) {
        const Slope& f1 = reg[(i + 1) % 3];
        const Slope& f2 = reg[(i + 2) % 3];
        if (!same_side(f1, f2, target, reg[i])) return i;
    }
    throw std::logic_error("no Farey step found (unreachable for canonical slopes)");
}

// Cross the edge of v opposite regions[i]; returns the neighboring vertex
// and reports the replaced region and its replacement.
struct VertexStep {
    TreeVertex vertex;
    Slope removed;
    Slope added;
};

inline VertexStep cross_edge(const TreeVertex& v, int i) {
    const Slope& f1 = v.regions[(i + 1) % 3];
    const Slope& f2 = v.regions[(i + 2) % 3];
    Slope added = fourth_region(f1, f2, v.regions[i]);
    return {make_vertex(f1, f2, added), v.regions[i], added};
}

namespace detail {

// A vertex of the growing ball together with the region it newly exposes.
// Crossing the edge opposite new_region leads back to the parent.
struct BallVertex {
    TreeVertex vertex;
    Slope new_region;
};

}  // namespace detail

// Ω_n: all regions touching the radius-n subtree around root. Sorted.
// |Ω_n| = 3·2^n.
inline std::vector<Slope> regions_within(int n, const TreeVertex& root = root_vertex()) {
    if (n < 0) throw std::invalid_argument("depth must be nonnegative");
    std::vector<Slope> out(root.regions.begin(), root.regions.end());
    std::vector<detail::BallVertex> level;
    for (int i = 0; i < 3; ++i) {
        auto st = cross_edge(root, i);
        level.push_back({st.vertex, st.added});
    }
    for (int depth = 1; depth <= n; ++depth) {
        std::vector<detail::BallVertex> next;
        for (const auto& bv : level) {
            out.push_back(bv.new_region);
            for (int i = 0; i < 3; ++i) {
                if (bv.vertex.regions[i] == bv.new_region) continue;
                VertexStep st = cross_edge(bv.vertex, i);
                next.push_back({st.vertex, st.added});
            }
        }
        std::sort(next.begin(), next.end(), [](const detail::BallVertex& a, const detail::BallVertex& b) {
            return canonical_less(a.new_region, b.new_region);
        });
        level = std::move(next);
    }
    std::sort(out.begin(), out.end(), SlopeCanonicalLess{});
    return out;
}

// C(Σ_n): directed edges meeting the radius-n subtree around root only at
// their head endpoint, i.e. the frontier edges pointing inward. |C_n| = 3·2^n.
inline std::vector<DirectedEdge> circular_set(int n, const TreeVertex& root = root_vertex()) {
    if (n < 0) throw std::invalid_argument("depth must be nonnegative");
    struct Node {
        TreeVertex vertex;
        Slope parent_region;  // region replaced when entering this vertex; 1-depth marker
        bool is_root;
    };
    std::vector<Node> level{{root, Slope{0, 1}, true}};
    for (int depth = 0; depth < n; ++depth) {
        std::vector<Node> next;
        for (const auto& nd : level) {
            for (int i = 0; i < 3; ++i) {
                if (!nd.is_root && nd.vertex.regions[i] == nd.parent_region) continue;
                VertexStep st = cross_edge(nd.vertex, i);
                next.push_back({st.vertex, st.added, false});
            }
        }
        level = std::move(next);
    }
    std::vector<DirectedEdge> out;
    for (const auto& nd : level) {
        for (int i = 0; i < 3; ++i) {
            if (!nd.is_root && nd.vertex.regions[i] == nd.parent_region) continue;
            VertexStep st = cross_edge(nd.vertex, i);
            // tail = the new exterior region, head = the replaced one
            out.push_back(make_edge(nd.vertex.regions[(i + 1) % 3], nd.vertex.regions[(i + 2) % 3],
                                    st.added, nd.vertex.regions[i]));
        }
    }
    std::sort(out.begin(), out.end(), edge_less);
    return out;
}

namespace detail {

// Rings of Ω^-(ē): ring 0 = {tail region}, ring d = regions first reached at
// tree distance d behind the tail vertex. |ring d| = 2^d.
inline std::vector<std::vector<Slope>> half_tree_rings(const DirectedEdge& e, int max_depth) {
    if (max_depth < 0) throw std::invalid_argument("depth must be nonnegative");
    std::vector<std::vector<Slope>> rings;
    rings.push_back({e.tail_region});
    struct Node {
        TreeVertex vertex;
        Slope parent_region;
    };
    // the tail vertex; crossing the edge opposite the tail region is e itself
    std::vector<Node> level{{tail_vertex(e), e.tail_region}};
    for (int depth = 1; depth <= max_depth; ++depth) {
        std::vector<Node> next;
        std::vector<Slope> ring;
        for (const auto& nd : level) {
            for (int i = 0; i < 3; ++i) {
                if (nd.vertex.regions[i] == nd.parent_region) continue;
                VertexStep st = cross_edge(nd.vertex, i);
                ring.push_back(st.added);
                next.push_back({st.vertex, st.added});
            }
        }
        std::sort(ring.begin(), ring.end(), SlopeCanonicalLess{});
        rings.push_back(std::move(ring));
        level = std::move(next);
    }
    return rings;
}

}  // namespace detail

// The slice of Ω^-(ē) at exactly `depth` steps behind the tail, disjoint from
// Ω^0(e) and from the symmetric call on the reversed edge; depth 0 is the
// tail region, unions over increasing depth exhaust Ω^-(ē).
inline std::vector<Slope> half_tree_regions(const DirectedEdge& e, int depth) {
    auto rings = detail::half_tree_rings(e, depth);
    return rings.back();
}

}  // namespace markoff
