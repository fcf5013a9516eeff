#pragma once

// Semi-decision procedure for the Bowditch conditions: descend along the
// φ-induced edge directions to a sink vertex, then explore outward until
// every frontier edge carries an escape certificate (satisfied), a trace in
// [−2,2] is found (violated), or the budget runs out (inconclusive).

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <vector>

#include "markoff/anosov.hpp"
#include "markoff/farey.hpp"
#include "markoff/identities.hpp"
#include "markoff/markoff_map.hpp"

namespace markoff {

enum class BQStatus { satisfied, violated, inconclusive };

inline const char* to_string(BQStatus s) {
    switch (s) {
        case BQStatus::satisfied: return "satisfied";
        case BQStatus::violated: return "violated";
        default: return "inconclusive";
    }
}

struct BQConfig {
    int max_depth = 64;
    double escape_threshold = 2.0 + 1e-9;
    bool relaxed = false;               // condition (i'): tolerate traces exactly ±2
    double interval_tolerance = 1e-12;  // membership tolerance for [−2,2] and ±2
    long max_vertices = 200000;         // work budget; exhaustion ⇒ inconclusive
};

struct BQReport {
    BQStatus status = BQStatus::inconclusive;
    std::vector<std::pair<Slope, cplx>> violating_regions;
    std::vector<std::pair<Slope, cplx>> small_trace_regions;  // |trace| ≤ 2, tolerated
    std::vector<TreeVertex> sink_vertices;
    int max_depth_explored = 0;
};

namespace detail {

inline double trace_magnitude(MarkoffMap& m, const Slope& x) {
    auto t = m.try_trace(x);
    return t ? std::abs(*t) : std::numeric_limits<double>::infinity();
}

inline bool near_plus_minus_two(cplx t, double tol) {
    return std::abs(t - 2.0) <= tol || std::abs(t + 2.0) <= tol;
}

// Escape certificate with the relaxed allowance: a flank passes when its
// magnitude exceeds the threshold, or (relaxed mode) when its trace is within
// tolerance of ±2; growth |w| ≥ 2|y| − |z| still diverges for |flank| ≥ 2.
inline bool escaping_edge(MarkoffMap& m, const DirectedEdge& e, const BQConfig& cfg,
                          bool relaxed) {
    double fx = trace_magnitude(m, e.flank[0]);
    double fy = trace_magnitude(m, e.flank[1]);
    auto flank_ok = [&](const Slope& f, double mag) {
        if (mag > cfg.escape_threshold) return true;
        if (!relaxed) return false;
        auto t = m.try_trace(f);
        return t && near_plus_minus_two(*t, cfg.interval_tolerance);
    };
    if (!flank_ok(e.flank[0], fx) || !flank_ok(e.flank[1], fy)) return false;
    double fw = trace_magnitude(m, e.head_region);
    return fw > fx && fw > fy;
}

}  // namespace detail

// True iff both flank magnitudes exceed threshold and the head magnitude
// exceeds both flanks, for an edge directed away from the sink — the
// certificate that every deeper trace grows monotonically.
inline bool is_escaping(MarkoffMap& m, const DirectedEdge& e, double threshold) {
    if (threshold <= 2.0) throw std::invalid_argument("escape threshold must exceed 2");
    BQConfig cfg;
    cfg.escape_threshold = threshold;
    return detail::escaping_edge(m, e, cfg, /*relaxed=*/false);
}

// Orient the edge towards the smaller-magnitude end region; ties (and a pair
// of escaped ends) break towards the canonically smaller slope.
inline DirectedEdge induced_direction(MarkoffMap& m, const DirectedEdge& e) {
    double mz = detail::trace_magnitude(m, e.tail_region);
    double mw = detail::trace_magnitude(m, e.head_region);
    if (mw < mz) return e;
    if (mz < mw) return reverse(e);
    return canonical_less(e.head_region, e.tail_region) ? e : reverse(e);
}

namespace detail {

struct Explorer {
    Explorer(MarkoffMap& map, const BQConfig& config, bool relax)
        : m(map), cfg(config), relaxed(relax) {}

    MarkoffMap& m;
    const BQConfig& cfg;
    bool relaxed;
    BQReport report;
    std::set<Slope, SlopeCanonicalLess> seen;
    long expanded = 0;
    bool out_of_budget = false;

    void classify(const Slope& x) {
        if (!seen.insert(x).second) return;
        auto t = m.try_trace(x);
        if (!t) return;  // escaped: certainly not small
        double d = dist_to_real_segment(*t);
        if (d <= cfg.interval_tolerance) {
            if (relaxed && near_plus_minus_two(*t, cfg.interval_tolerance)) {
                report.small_trace_regions.emplace_back(x, *t);
            } else {
                report.violating_regions.emplace_back(x, *t);
            }
            return;
        }
        if (std::abs(*t) <= 2.0) report.small_trace_regions.emplace_back(x, *t);
    }

    bool budget_step() {
        if (++expanded > cfg.max_vertices) {
            out_of_budget = true;
            return false;
        }
        return true;
    }

    // Steepest strict descent on the replaced region's magnitude. Returns the
    // sink vertex, or nullopt when the depth budget runs out first.
    std::optional<TreeVertex> descend(TreeVertex cur) {
        for (const Slope& x : cur.regions) classify(x);
        for (int step = 0; step < cfg.max_depth; ++step) {
            if (!report.violating_regions.empty()) return cur;
            int best = -1;
            double best_drop = 0.0;
            Slope best_added{};
            for (int i = 0; i < 3; ++i) {
                VertexStep st = cross_edge(cur, i);
                double mo = trace_magnitude(m, st.removed);
                double mw = trace_magnitude(m, st.added);
                if (!(mw < mo)) continue;
                double drop = mo - mw;
                if (best < 0 || drop > best_drop ||
                    (drop == best_drop && canonical_less(st.added, best_added))) {
                    best = i;
                    best_drop = drop;
                    best_added = st.added;
                }
            }
            if (best < 0) return cur;  // sink: no strictly descending edge
            if (!budget_step()) return std::nullopt;
            VertexStep st = cross_edge(cur, best);
            cur = st.vertex;
            classify(st.added);
            report.max_depth_explored = std::max(report.max_depth_explored, step + 1);
        }
        return std::nullopt;
    }

    void explore_from(const TreeVertex& sink) {
        struct Node {
            TreeVertex vertex;
            Slope parent_region;  // crossing opposite this region leads back
            int depth;
            bool is_sink;
        };
        std::deque<Node> queue{{sink, Slope{}, 0, true}};
        while (!queue.empty()) {
            Node nd = queue.front();
            queue.pop_front();
            report.max_depth_explored = std::max(report.max_depth_explored, nd.depth);
            for (int i = 0; i < 3; ++i) {
                if (!nd.is_sink && nd.vertex.regions[i] == nd.parent_region) continue;
                VertexStep st = cross_edge(nd.vertex, i);
                classify(st.added);
                if (!report.violating_regions.empty()) continue;  // drain, stop growing
                DirectedEdge outward =
                    make_edge(nd.vertex.regions[(i + 1) % 3], nd.vertex.regions[(i + 2) % 3],
                              st.removed, st.added);
                if (escaping_edge(m, outward, cfg, relaxed)) continue;
                if (nd.depth + 1 >= cfg.max_depth || !budget_step()) {
                    out_of_budget = true;
                    continue;
                }
                queue.push_back({st.vertex, st.added, nd.depth + 1, false});
            }
        }
    }

    BQReport run() {
        auto sink = descend(m.root());
        if (!report.violating_regions.empty()) {
            report.status = BQStatus::violated;
            return report;
        }
        if (!sink) {
            report.status = BQStatus::inconclusive;
            return report;
        }
        explore_from(*sink);
        if (!report.violating_regions.empty()) {
            report.status = BQStatus::violated;
        } else if (out_of_budget) {
            report.status = BQStatus::inconclusive;
        } else {
            report.status = BQStatus::satisfied;
            report.sink_vertices.push_back(*sink);
        }
        return report;
    }
};

}  // namespace detail

// Strict Bowditch test: descend to the attracting subtree, then certify the
// frontier. Never returns a false verdict: shrinking budgets can only move
// results towards inconclusive.
inline BQReport find_sink(MarkoffMap& m, const BQConfig& cfg = {}) {
    detail::Explorer ex{m, cfg, /*relaxed=*/false};
    return ex.run();
}

// find_sink honoring cfg.relaxed (condition (i')): traces within
// interval_tolerance of ±2 are recorded as witnesses, not violations.
inline BQReport check_bq(MarkoffMap& m, const BQConfig& cfg = {}) {
    detail::Explorer ex{m, cfg, cfg.relaxed};
    return ex.run();
}

// Character-level invariance: φ(θX) = φ(X) for all X within depth.
inline bool check_theta_invariance(MarkoffMap& m, const IntegerMatrix2& theta, int depth,
                                   double tol = 1e-8) {
    require_anosov(theta);
    for (const Slope& x : regions_within(depth, m.root())) {
        Slope tx = anosov_apply(theta, x);
        auto a = m.try_trace(x);
        auto b = m.try_trace(tx);
        if (!a && !b) continue;  // both escaped
        if (!a || !b) return false;
        if (std::abs(*a - *b) > tol * std::max({1.0, std::abs(*a), std::abs(*b)})) return false;
    }
    return true;
}

// Relative Bowditch conditions on Ω/θ, tested on orbit representatives:
// condition (i) on every representative within budget and a small-trace set
// that has stopped growing. A semi-decision; never a false "violated".
inline BQReport check_relative_bq(MarkoffMap& m, const IntegerMatrix2& theta,
                                  const BQConfig& cfg = {}) {
    require_anosov(theta);
    int depth = std::min(cfg.max_depth, 12);
    BQReport report;
    report.max_depth_explored = depth;
    std::vector<std::size_t> small_counts;
    std::set<Slope, SlopeCanonicalLess> seen;
    for (int d = depth - 2 >= 1 ? depth - 2 : 1; d <= depth; ++d) {
        for (const Slope& x : orbit_representatives(theta, d, m.root())) {
            if (!seen.insert(x).second) continue;
            auto t = m.try_trace(x);
            if (!t) continue;
            double dist = dist_to_real_segment(*t);
            if (dist <= cfg.interval_tolerance) {
                if (cfg.relaxed && detail::near_plus_minus_two(*t, cfg.interval_tolerance))
                    report.small_trace_regions.emplace_back(x, *t);
                else
                    report.violating_regions.emplace_back(x, *t);
            } else if (std::abs(*t) <= 2.0) {
                report.small_trace_regions.emplace_back(x, *t);
            }
        }
        small_counts.push_back(report.small_trace_regions.size());
    }
    if (!report.violating_regions.empty())
        report.status = BQStatus::violated;
    else if (small_counts.size() >= 2 &&
             small_counts.back() == small_counts[small_counts.size() - 2])
        report.status = BQStatus::satisfied;
    else
        report.status = BQStatus::inconclusive;
    return report;
}

}  // namespace markoff
