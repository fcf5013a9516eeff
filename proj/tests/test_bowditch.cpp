#include <catch2/catch_amalgamated.hpp>

#include "markoff/bowditch.hpp"

using namespace markoff;

namespace {
const IntegerMatrix2 kTheta{2, 1, 1, 1};
}

TEST_CASE("induced direction points at the smaller end", "[bowditch]") {
    auto m = MarkoffMap::from_seed(3, 3, 3);
    DirectedEdge e = make_edge(Slope{0, 1}, Slope{1, 0}, Slope{1, 1}, normalize(-1, 1));
    DirectedEdge d = induced_direction(m, e);
    CHECK(d.head_region == Slope{1, 1});  // |3| < |6|
    CHECK(induced_direction(m, reverse(e)) == d);

    // genuine tie: with seed (2.5, 2.5, 3.125) both ends of the root edge
    // {0/1, 1/0} carry 3.125, so the canonical tie-break picks 1/1
    auto sym = MarkoffMap::from_seed(2.5, 2.5, 3.125);
    CHECK(sym.trace(normalize(-1, 1)) == cplx(3.125));
    DirectedEdge tie = make_edge(Slope{0, 1}, Slope{1, 0}, normalize(-1, 1), Slope{1, 1});
    DirectedEdge td = induced_direction(sym, tie);
    CHECK(td.head_region == Slope{1, 1});
    CHECK(induced_direction(sym, reverse(tie)) == td);
}

TEST_CASE("escape certificate", "[bowditch]") {
    auto m = MarkoffMap::from_seed(3, 3, 3);
    // flanks (3, 6), outward head 15: certificate holds above threshold 2.1
    DirectedEdge out = make_edge(Slope{1, 0}, normalize(2, 1), Slope{1, 1}, normalize(3, 1));
    CHECK(m.trace(out.head_region) == cplx(15.0));
    CHECK(is_escaping(m, out, 2.1));
    // flanks (3,3), head 3: no strict growth
    DirectedEdge flat = make_edge(Slope{0, 1}, Slope{1, 0}, normalize(-1, 1), Slope{1, 1});
    CHECK_FALSE(is_escaping(m, flat, 2.1));
    // a flank at magnitude <= threshold fails
    auto small = MarkoffMap::from_seed(2, 5, 8);
    DirectedEdge se = make_edge(Slope{0, 1}, Slope{1, 0}, Slope{1, 1}, normalize(-1, 1));
    (void)small.trace(normalize(-1, 1));
    CHECK_FALSE(is_escaping(small, se, 2.1));
    CHECK_THROWS_AS(is_escaping(m, out, 1.5), std::invalid_argument);
}

TEST_CASE("find_sink on the Fuchsian seed", "[bowditch]") {
    auto m = MarkoffMap::from_seed(3, 3, 3);
    BQReport r = find_sink(m);
    CHECK(r.status == BQStatus::satisfied);
    REQUIRE_FALSE(r.sink_vertices.empty());
    CHECK(r.sink_vertices.front() == root_vertex());
    CHECK(r.violating_regions.empty());
    CHECK(r.small_trace_regions.empty());
    // oracle: every trace within depth 10 is a real number >= 3
    for (const Slope& x : regions_within(10, m.root())) {
        auto t = m.try_trace(x);
        if (!t) continue;  // escaped: certainly large
        CHECK(t->imag() == 0.0);
        CHECK(t->real() >= 3.0);
    }
}

TEST_CASE("negative controls are violated with witnesses", "[bowditch]") {
    auto a = MarkoffMap::from_seed(2, 2, 2);
    BQReport ra = find_sink(a);
    CHECK(ra.status == BQStatus::violated);
    REQUIRE_FALSE(ra.violating_regions.empty());
    CHECK(ra.violating_regions.front().second == cplx(2.0));

    auto b = MarkoffMap::from_seed(1, 1, 1);
    CHECK(find_sink(b).status == BQStatus::violated);
    BQConfig relaxed_cfg;
    relaxed_cfg.relaxed = true;
    CHECK(check_bq(b, relaxed_cfg).status == BQStatus::violated);

    auto c = MarkoffMap::from_seed(0, cplx(2.5, 1.0), cplx(3.0, -0.5));
    BQReport rc = find_sink(c);
    CHECK(rc.status == BQStatus::violated);
    bool found_zero = false;
    for (const auto& [slope, trace] : rc.violating_regions)
        if (trace == cplx(0.0)) found_zero = true;
    CHECK(found_zero);
}

TEST_CASE("relaxed mode tolerates an exact two and certifies the frontier", "[bowditch]") {
    // fan around the trace-2 region: 2.5 + 5n, never inside (-2, 2)
    auto m = MarkoffMap::from_seed(2, 2.5, 7.5);
    BQReport strict = check_bq(m);
    CHECK(strict.status == BQStatus::violated);

    auto m2 = MarkoffMap::from_seed(2, 2.5, 7.5);
    BQConfig cfg;
    cfg.relaxed = true;
    BQReport relaxed = check_bq(m2, cfg);
    CHECK(relaxed.status == BQStatus::satisfied);
    bool witness_two = false;
    for (const auto& [slope, trace] : relaxed.small_trace_regions)
        if (slope == Slope{0, 1} && trace == cplx(2.0)) witness_two = true;
    CHECK(witness_two);
}

TEST_CASE("budget exhaustion degrades to inconclusive", "[bowditch]") {
    // z just outside the real segment: slow dynamics; a tiny budget cannot decide
    auto m = MarkoffMap::from_seed(3.0, 3.0, cplx(1.0, 0.4));
    BQConfig tiny;
    tiny.max_depth = 2;
    tiny.max_vertices = 10;
    BQReport r = check_bq(m, tiny);
    CHECK(r.status != BQStatus::satisfied);

    // with a real budget the verdict is definite; the tiny budget never
    // contradicts it (no false verdicts)
    auto m2 = MarkoffMap::from_seed(3.0, 3.0, cplx(1.0, 0.4));
    BQReport full = check_bq(m2);
    if (r.status != BQStatus::inconclusive) CHECK(r.status == full.status);
}

TEST_CASE("monotone escape along certified branches", "[bowditch]") {
    auto m = MarkoffMap::from_seed(3.1, cplx(2.9, 0.05), cplx(2.95, -0.1));
    BQReport r = check_bq(m);
    REQUIRE(r.status == BQStatus::satisfied);
    // sample 5 levels down a branch behind the root edge; the marker is the
    // region whose opposite crossing would walk back towards the root
    double prev = std::abs(m.trace(normalize(-1, 1)));
    TreeVertex v = make_vertex(Slope{0, 1}, Slope{1, 0}, normalize(-1, 1));
    Slope marker = normalize(-1, 1);
    for (int d = 0; d < 5; ++d) {
        int pick = -1;
        for (int i = 0; i < 3; ++i)
            if (!(v.regions[i] == marker)) {
                pick = i;
                break;
            }
        VertexStep st = cross_edge(v, pick);
        double cur = std::abs(m.trace(st.added));
        CHECK(cur > prev);
        prev = cur;
        marker = st.added;
        v = st.vertex;
    }
}

TEST_CASE("theta invariance check distinguishes fixed characters", "[bowditch]") {
    // analytically fixed: x = z = (3 + i*sqrt(3))/2, y = conj(x)
    cplx x(1.5, std::sqrt(3.0) / 2.0);
    auto fixed = MarkoffMap::from_seed(x, std::conj(x), x);
    CHECK(check_theta_invariance(fixed, kTheta, 6));

    auto generic = MarkoffMap::from_seed(3.0, cplx(3.0, 0.1), 3.0);
    CHECK_FALSE(check_theta_invariance(generic, kTheta, 4));

    CHECK_THROWS_AS(check_theta_invariance(fixed, IntegerMatrix2{1, 0, 0, 1}, 4),
                    std::invalid_argument);
}

TEST_CASE("relative Bowditch semi-check", "[bowditch]") {
    cplx x(1.5, std::sqrt(3.0) / 2.0);
    auto fixed = MarkoffMap::from_seed(x, std::conj(x), x);
    BQReport rel = check_relative_bq(fixed, kTheta);
    CHECK(rel.status == BQStatus::satisfied);
    CHECK_FALSE(rel.small_trace_regions.empty());  // |x| = sqrt(3) <= 2

    auto degenerate = MarkoffMap::from_seed(0, 0, 0);
    CHECK(check_relative_bq(degenerate, kTheta).status == BQStatus::violated);
}
