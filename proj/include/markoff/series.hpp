#pragma once

// Truncated-series engines for the four identity families. Exhaustion is
// rooted at the attracting subtree; the tail is bounded by an empirical
// K-constant against the frontier edge values, mirroring the convergence
// argument: |Ψ(x_old, y_new; z) − h_μ(x_old)| ≤ K |y_new|².

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "markoff/anosov.hpp"
#include "markoff/bowditch.hpp"
#include "markoff/identities.hpp"
#include "markoff/markoff_map.hpp"

namespace markoff {

class precondition_error : public std::runtime_error {
public:
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

struct SeriesResult {
    cplx value{};
    std::size_t terms_used = 0;
    int depth = 0;
    double residual_estimate = std::numeric_limits<double>::infinity();
    double k_hat = 0.0;
    bool converged = false;
    bool reliable = true;  // false when forced past a failed precondition
};

struct SumOptions {
    bool force = false;  // evaluate even when the precondition fails (marked unreliable)
    BQConfig bq{};
    const BQReport* precomputed_bq = nullptr;
    long max_terms = 4000000;  // work budget across all levels
};

namespace detail {

// h evaluation inside an engine: certified maps stay in the checked domain
// except for relaxed ±2 witnesses, which use the plain formula; under force
// everything non-evaluable contributes 0.
inline std::optional<cplx> engine_h(cplx t, cplx mu, cplx p, const BQConfig& cfg, bool relaxed,
                                    bool force) {
    HDomain dom = h_domain_check(t, mu);
    if (dom == HDomain::ok) return h_weighted_value(t, mu, p);
    if (dom == HDomain::on_real_segment && relaxed &&
        near_plus_minus_two(t, cfg.interval_tolerance))
        return h_weighted_value(t, mu, p);
    if (force) return std::nullopt;
    h_domain_require(t, mu);  // throws with the exclusion that was hit
    return std::nullopt;      // unreachable
}

struct EngineStart {
    TreeVertex vertex;
    std::optional<Slope> parent_region;  // crossing opposite it is excluded
};

struct EngineSpec {
    std::vector<EngineStart> starts;
    std::vector<std::pair<Slope, double>> initial_terms;  // (region, multiplicity)
    double deep_weight = 1.0;  // multiplicity of regions beyond the start vertices
    Weights weights{};
    bool relaxed = false;
    bool force = false;
};

inline SeriesResult weighted_tree_sum(MarkoffMap& m, const EngineSpec& spec, double tol,
                                      int max_depth, const BQConfig& cfg, long max_terms) {
    SeriesResult res;
    res.reliable = !spec.force;
    cplx mu = m.mu();

    auto h_of = [&](const Slope& x, cplx t) {
        return engine_h(t, mu, spec.weights.for_class(parity_class(x)), cfg, spec.relaxed,
                        spec.force);
    };

    for (const auto& [slope, weight] : spec.initial_terms) {
        auto t = m.try_trace(slope);
        if (!t) continue;
        if (auto h = h_of(slope, *t)) res.value += weight * *h;
        ++res.terms_used;
    }

    struct Node {
        TreeVertex vertex;
        Slope parent_region;
    };
    std::vector<Node> level;
    for (const auto& st : spec.starts) {
        for (int i = 0; i < 3; ++i) {
            if (st.parent_region && st.vertex.regions[i] == *st.parent_region) continue;
            VertexStep step = cross_edge(st.vertex, i);
            level.push_back({step.vertex, step.added});
        }
    }
    std::sort(level.begin(), level.end(),
              [](const Node& a, const Node& b) { return canonical_less(a.parent_region, b.parent_region); });

    double prev_tail = -1.0;
    long budget = max_terms;
    for (int depth = 1; depth <= max_depth && !level.empty(); ++depth) {
        res.depth = depth;
        double tail_sum = 0.0;
        std::vector<Node> next;
        for (const Node& nd : level) {
            const Slope& w_slope = nd.parent_region;  // region exposed by this vertex
            auto tw = m.try_trace(w_slope);
            if (!tw) continue;  // escaped: term and tail contribution below 1e-300
            ++res.terms_used;
            if (auto h = h_of(w_slope, *tw)) res.value += spec.deep_weight * *h;

            // frontier estimator on the two inward edges at this vertex:
            // flank {old region, new region}, head = the remaining old region
            for (int i = 0; i < 3; ++i) {
                const Slope& old_flank = nd.vertex.regions[i];
                if (old_flank == w_slope) continue;
                const Slope* head_ptr = nullptr;
                for (int j = 0; j < 3; ++j)
                    if (j != i && !(nd.vertex.regions[j] == w_slope)) head_ptr = &nd.vertex.regions[j];
                const Slope& head = *head_ptr;
                auto tx = m.try_trace(old_flank);
                auto tz = m.try_trace(head);
                if (!tx || !tz) continue;
                double mag2 = std::norm(*tw);
                tail_sum += 1.0 / mag2;
                // |Ψ − h| is ~K/|y|², far below double noise once |y| is
                // large; only moderate edges give a usable K estimate
                if (std::abs(*tw) > 1e6) continue;
                cplx px = spec.weights.for_class(parity_class(old_flank));
                cplx pw = spec.weights.for_class(parity_class(w_slope));
                if (h_domain_check(*tx, mu) == HDomain::ok &&
                    std::abs(*tx) > 1e-9 && std::abs(*tw) > 1e-9) {
                    cplx edge_val = weighted_psi_value(*tx, *tw, *tz, mu, px, pw);
                    cplx href = h_weighted_value(*tx, mu, px);
                    res.k_hat = std::max(res.k_hat, std::abs(edge_val - href) * mag2);
                }
            }
            for (int i = 0; i < 3; ++i) {
                if (nd.vertex.regions[i] == nd.parent_region) continue;
                VertexStep step = cross_edge(nd.vertex, i);
                next.push_back({step.vertex, step.added});
            }
            if (--budget < 0) break;
        }
        if (budget < 0) break;

        double rho = prev_tail > 0.0 ? std::clamp(tail_sum / prev_tail, 0.0, 0.9) : 0.5;
        res.residual_estimate = 4.0 * std::max(res.k_hat, 1.0) * tail_sum / (1.0 - rho);
        prev_tail = tail_sum;
        if (tail_sum == 0.0) {  // frontier fully escaped
            res.residual_estimate = 0.0;
            res.converged = true;
            break;
        }
        if (depth >= 2 && res.residual_estimate < tol) {
            res.converged = true;
            break;
        }
        std::sort(next.begin(), next.end(), [](const Node& a, const Node& b) {
            return canonical_less(a.parent_region, b.parent_region);
        });
        level = std::move(next);
    }
    return res;
}

inline BQReport established_bq(MarkoffMap& m, const SumOptions& opts, bool* ok) {
    BQReport report = opts.precomputed_bq ? *opts.precomputed_bq : check_bq(m, opts.bq);
    *ok = report.status == BQStatus::satisfied;
    return report;
}

}  // namespace detail

// Σ_{X ∈ Ω} h_{μ,p_c(X)}(x) over growing balls around the attracting subtree;
// converges to 1/2 under the Bowditch conditions.
inline SeriesResult sum_tricolor(MarkoffMap& m, const Weights& w, double tol, int max_depth,
                                 const SumOptions& opts = {}) {
    bool ok = false;
    BQReport bq = detail::established_bq(m, opts, &ok);
    if (!ok && !opts.force)
        throw precondition_error(std::string("Bowditch conditions not established (") +
                                 to_string(bq.status) + "); pass force to evaluate anyway");
    TreeVertex center = bq.sink_vertices.empty() ? m.root() : bq.sink_vertices.front();
    detail::EngineSpec spec;
    spec.starts = {{center, std::nullopt}};
    for (const Slope& x : center.regions) spec.initial_terms.emplace_back(x, 1.0);
    spec.deep_weight = 1.0;
    spec.weights = w;
    spec.relaxed = opts.bq.relaxed;
    spec.force = !ok;
    return detail::weighted_tree_sum(m, spec, tol, max_depth, opts.bq, opts.max_terms);
}

inline SeriesResult sum_main(MarkoffMap& m, double tol, int max_depth,
                             const SumOptions& opts = {}) {
    return sum_tricolor(m, Weights{}, tol, max_depth, opts);
}

// Σ_{X ∈ Ω^0(e)} h_μ(x) + Σ_{X ∈ Ω^-(ē)} 2 h_μ(x) → ψ(ē).
inline SeriesResult sum_branch(MarkoffMap& m, const DirectedEdge& e, double tol, int max_depth,
                               const SumOptions& opts = {}) {
    bool ok = false;
    BQReport bq = detail::established_bq(m, opts, &ok);
    if (!ok && !opts.force)
        throw precondition_error(std::string("Bowditch conditions not established (") +
                                 to_string(bq.status) + "); pass force to evaluate anyway");
    detail::EngineSpec spec;
    spec.starts = {{tail_vertex(e), e.tail_region}};
    spec.initial_terms = {{e.flank[0], 1.0}, {e.flank[1], 1.0}, {e.tail_region, 2.0}};
    spec.deep_weight = 2.0;
    spec.relaxed = opts.bq.relaxed;
    spec.force = !ok;
    return detail::weighted_tree_sum(m, spec, tol, max_depth, opts.bq, opts.max_terms);
}

struct RelativeOptions {
    bool force = false;
    BQConfig bq{};
    int invariance_depth = 6;
    double invariance_tol = 1e-8;
    long max_terms = 4000000;
};

// Σ_{[X] ∈ Ω/θ} h_μ(x) over orbit representatives; converges to 0 for
// θ-invariant characters satisfying the relative Bowditch conditions.
inline SeriesResult sum_relative(MarkoffMap& m, const IntegerMatrix2& theta, double tol,
                                 int max_depth, const RelativeOptions& opts = {}) {
    require_anosov(theta);
    bool invariant = check_theta_invariance(m, theta, opts.invariance_depth, opts.invariance_tol);
    if (!invariant && !opts.force)
        throw precondition_error("character is not invariant under the mapping class");
    BQReport rel = check_relative_bq(m, theta, opts.bq);
    if (rel.status != BQStatus::satisfied && !opts.force)
        throw precondition_error(std::string("relative Bowditch conditions not established (") +
                                 to_string(rel.status) + ")");

    SeriesResult res;
    res.reliable = invariant && rel.status == BQStatus::satisfied;
    IntegerMatrix2 theta_inv = inverse(theta);
    std::set<Slope, SlopeCanonicalLess> seen;
    cplx mu = m.mu();
    double prev_new = -1.0;
    double prev_resid = std::numeric_limits<double>::infinity();
    long budget = opts.max_terms;

    auto add_region = [&](const Slope& x, double& new_abs) {
        Slope rep = detail::orbit_representative(theta, theta_inv, x);
        if (!seen.insert(rep).second) return;
        auto t = m.try_trace(rep);
        if (!t) return;
        auto h = detail::engine_h(*t, mu, cplx(1.0 / 3.0), opts.bq, opts.bq.relaxed,
                                  opts.force || !res.reliable);
        if (!h) return;
        res.value += *h;
        new_abs += std::abs(*h);
        ++res.terms_used;
    };

    struct Node {
        TreeVertex vertex;
        Slope new_region;  // crossing opposite it leads back towards the root
    };
    double root_abs = 0.0;
    for (const Slope& x : m.root().regions) add_region(x, root_abs);
    std::vector<Node> level;
    for (int i = 0; i < 3; ++i) {
        VertexStep st = cross_edge(m.root(), i);
        level.push_back({st.vertex, st.added});
    }
    for (int depth = 1; depth <= max_depth && !level.empty(); ++depth) {
        res.depth = depth;
        double new_abs = 0.0;
        std::vector<Node> next;
        for (const Node& nd : level) {
            if (--budget < 0) break;
            add_region(nd.new_region, new_abs);
            // on an invariant map every orbit member shares its trace, so
            // subtrees behind an escaped region only hold escaped orbits
            if (m.is_escaped(nd.new_region)) continue;
            for (int i = 0; i < 3; ++i) {
                if (nd.vertex.regions[i] == nd.new_region) continue;
                VertexStep st = cross_edge(nd.vertex, i);
                next.push_back({st.vertex, st.added});
            }
        }
        if (budget < 0) break;
        std::sort(next.begin(), next.end(), [](const Node& a, const Node& b) {
            return canonical_less(a.new_region, b.new_region);
        });
        level = std::move(next);
        double rho = prev_new > 0.0 ? std::clamp(new_abs / prev_new, 0.0, 0.9) : 0.5;
        res.residual_estimate = 4.0 * new_abs / (1.0 - rho);
        prev_new = std::max(new_abs, 1e-300);
        if (depth >= 4 && res.residual_estimate < tol && prev_resid < 8.0 * tol) {
            res.converged = true;
            break;
        }
        prev_resid = res.residual_estimate;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Fixed characters of an Anosov mapping class: damped Gauss–Newton on
// F_θ(v) − v = 0 (the pulled-back seed must reproduce the seed) plus the
// μ constraint, verified afterwards by check_theta_invariance.

namespace detail {

// Seed of the pulled-back character: traces at θ⁻¹ of the root slopes.
inline std::array<cplx, 3> pullback_seed(const IntegerMatrix2& theta_inv, cplx x, cplx y, cplx z) {
    MarkoffMap map = MarkoffMap::from_seed(x, y, z);
    std::array<Slope, 3> roots{Slope{0, 1}, Slope{1, 0}, Slope{1, 1}};
    std::array<cplx, 3> out{};
    for (int i = 0; i < 3; ++i) out[i] = map.trace(anosov_apply(theta_inv, roots[i]));
    return out;
}

inline std::array<cplx, 4> fixed_point_residual(const IntegerMatrix2& theta_inv, cplx mu0,
                                                const std::array<cplx, 3>& v) {
    auto f = pullback_seed(theta_inv, v[0], v[1], v[2]);
    return {f[0] - v[0], f[1] - v[1], f[2] - v[2], markoff_mu(v[0], v[1], v[2]) - mu0};
}

inline double residual_norm(const std::array<cplx, 4>& r) {
    double s = 0.0;
    for (const cplx& c : r) s += std::norm(c);
    return std::sqrt(s);
}

// Solve the 3x3 complex system N d = g by Gaussian elimination with partial
// pivoting; returns false when the pivot collapses.
inline bool solve3(std::array<std::array<cplx, 3>, 3> n, std::array<cplx, 3> g,
                   std::array<cplx, 3>& out) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int rr = col + 1; rr < 3; ++rr)
            if (std::abs(n[rr][col]) > std::abs(n[piv][col])) piv = rr;
        if (std::abs(n[piv][col]) < 1e-300) return false;
        std::swap(n[piv], n[col]);
        std::swap(g[piv], g[col]);
        for (int rr = col + 1; rr < 3; ++rr) {
            cplx f = n[rr][col] / n[col][col];
            for (int cc = col; cc < 3; ++cc) n[rr][cc] -= f * n[col][cc];
            g[rr] -= f * g[col];
        }
    }
    for (int rr = 2; rr >= 0; --rr) {
        cplx acc = g[rr];
        for (int cc = rr + 1; cc < 3; ++cc) acc -= n[rr][cc] * out[cc];
        out[rr] = acc / n[rr][rr];
    }
    return true;
}

}  // namespace detail

inline std::vector<std::array<cplx, 3>> default_fixed_seed_starts() {
    return {
        {cplx(1.5, 0.9), cplx(1.5, -0.9), cplx(1.5, 0.9)},
        {cplx(3.0, 0.5), cplx(3.0, -0.5), cplx(3.0, 0.5)},
        {cplx(2.2, 0.7), cplx(1.8, -0.6), cplx(2.5, 0.3)},
        {cplx(1.0, 1.0), cplx(2.0, -1.0), cplx(1.0, 0.5)},
        {cplx(0.5, 1.2), cplx(0.5, -1.2), cplx(0.5, 1.2)},
        {cplx(2.8, -0.4), cplx(2.1, 0.9), cplx(1.7, -0.2)},
    };
}

// Characters with the given μ fixed by θ: converged and verified Newton
// solutions (invariance checked to depth 6, reducible μ = 4 excluded).
// An empty result means no start converged; it is not an error.
inline std::vector<MarkoffTriple> anosov_fixed_seed(
    const IntegerMatrix2& theta, cplx mu0,
    const std::vector<std::array<cplx, 3>>& starts = default_fixed_seed_starts()) {
    require_anosov(theta);
    IntegerMatrix2 theta_inv = inverse(theta);
    std::vector<MarkoffTriple> found;

    auto try_residual = [&](const std::array<cplx, 3>& v) -> std::optional<std::array<cplx, 4>> {
        try {
            return detail::fixed_point_residual(theta_inv, mu0, v);
        } catch (const escape_error&) {
            return std::nullopt;
        } catch (const overflow_error&) {
            return std::nullopt;
        }
    };

    for (const auto& start : starts) {
        std::array<cplx, 3> v = start;
        auto r0 = try_residual(v);
        if (!r0) continue;
        std::array<cplx, 4> r = *r0;
        bool converged = false;
        for (int iter = 0; iter < 80; ++iter) {
            double rn = detail::residual_norm(r);
            double scale = std::max({1.0, std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
            if (rn <= 1e-12 * scale) {
                converged = true;
                break;
            }
            // central-difference Jacobian of the 4 residuals in the 3 unknowns
            std::array<std::array<cplx, 3>, 4> jac{};
            const double step = 1e-6;
            bool jac_ok = true;
            for (int j = 0; j < 3 && jac_ok; ++j) {
                std::array<cplx, 3> vp = v, vm = v;
                vp[j] += step;
                vm[j] -= step;
                auto rp = try_residual(vp);
                auto rm = try_residual(vm);
                if (!rp || !rm) {
                    jac_ok = false;
                    break;
                }
                for (int i = 0; i < 4; ++i) jac[i][j] = ((*rp)[i] - (*rm)[i]) / (2.0 * step);
            }
            if (!jac_ok) break;
            // Gauss-Newton step from the normal equations JᴴJ d = −JᴴR
            std::array<std::array<cplx, 3>, 3> n{};
            std::array<cplx, 3> g{};
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b)
                    for (int i = 0; i < 4; ++i) n[a][b] += std::conj(jac[i][a]) * jac[i][b];
                for (int i = 0; i < 4; ++i) g[a] -= std::conj(jac[i][a]) * r[i];
            }
            std::array<cplx, 3> delta{};
            if (!detail::solve3(n, g, delta)) break;
            double t = 1.0;
            bool stepped = false;
            while (t > 1e-6) {
                std::array<cplx, 3> vn = {v[0] + t * delta[0], v[1] + t * delta[1],
                                          v[2] + t * delta[2]};
                auto rn2 = try_residual(vn);
                if (rn2 && detail::residual_norm(*rn2) < (1.0 - 0.25 * t) * rn) {
                    v = vn;
                    r = *rn2;
                    stepped = true;
                    break;
                }
                t /= 2.0;
            }
            if (!stepped) break;
        }
        if (!converged) continue;
        if (std::abs(markoff_mu(v[0], v[1], v[2]) - 4.0) <= 1e-8) continue;  // reducible artifact
        bool duplicate = false;
        for (const auto& f : found)
            if (std::abs(f.x - v[0]) + std::abs(f.y - v[1]) + std::abs(f.z - v[2]) < 1e-7)
                duplicate = true;
        if (duplicate) continue;
        MarkoffMap map = MarkoffMap::from_seed(v[0], v[1], v[2]);
        if (!check_theta_invariance(map, theta, 6)) continue;
        found.push_back(make_triple(v[0], v[1], v[2]));
    }
    return found;
}

}  // namespace markoff
