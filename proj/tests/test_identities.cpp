#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "markoff/identities.hpp"
#include "markoff/markoff_map.hpp"

using namespace markoff;

namespace {

// Vertices within distance n of root, with entry markers (test-side walker).
struct BallNode {
    TreeVertex v;
    Slope marker;
    bool is_root;
};

std::vector<BallNode> ball_nodes(int n, const TreeVertex& root) {
    std::vector<BallNode> out{{root, Slope{0, 1}, true}};
    std::vector<BallNode> level = out;
    for (int d = 0; d < n; ++d) {
        std::vector<BallNode> next;
        for (const auto& nd : level)
            for (int i = 0; i < 3; ++i) {
                if (!nd.is_root && nd.v.regions[i] == nd.marker) continue;
                VertexStep st = cross_edge(nd.v, i);
                next.push_back({st.vertex, st.added, false});
            }
        out.insert(out.end(), next.begin(), next.end());
        level = std::move(next);
    }
    return out;
}

MarkoffMap complex_test_map() {
    cplx x(3.1, 0.0), y(2.9, 0.05), mu(0.2, 0.1);
    return MarkoffMap::from_seed(x, y, z_branch(x, y, mu));
}

}  // namespace

TEST_CASE("principal square root", "[identities]") {
    CHECK(sqrt_principal(4.0) == cplx(2.0));
    CHECK(sqrt_principal(-1.0) == cplx(0.0, 1.0));
    CHECK(sqrt_principal(cplx(-4.0, -0.0)) == cplx(0.0, 2.0));  // boundary stays on +i
    CHECK(std::abs(sqrt_principal(cplx(3, 4)) - cplx(2, 1)) < 1e-15);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-10.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        cplx w(d(rng), d(rng));
        cplx r = sqrt_principal(w);
        CHECK(r.real() >= 0.0);
        CHECK(std::abs(r * r - w) < 1e-12 * std::max(1.0, std::abs(w)));
    }
}

TEST_CASE("h_mu values and exclusions", "[identities]") {
    // mu = 0, x = 3: (1 - sqrt(5)/3)/2, evaluated through separate arithmetic
    double expected = 0.5 * (1.0 - std::sqrt(5.0) / 3.0);
    CHECK(std::abs(h_mu(3.0, 0.0) - cplx(expected)) < 1e-15);
    CHECK(std::abs(h_mu(3.0, 0.0).real() - 0.1273220) < 1e-7);

    CHECK_THROWS_AS(h_mu(0.0, 1.0), h_domain_error);
    CHECK_THROWS_AS(h_mu(1.5, 0.0), h_domain_error);
    CHECK_THROWS_AS(h_mu(cplx(2.0), 4.0), h_domain_error);
    try {
        h_mu(1.5, 0.0);
    } catch (const h_domain_error& e) {
        CHECK(e.which() == HDomain::on_real_segment);
    }
    try {
        h_mu(cplx(0, 1.4), cplx(-1.96, 0));
    } catch (const h_domain_error& e) {
        CHECK(e.which() == HDomain::at_sqrt_mu);
    }
}

TEST_CASE("h is even and decays quadratically", "[identities]") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        cplx x(d(rng), d(rng));
        cplx mu(d(rng) * 0.2, d(rng) * 0.2);
        if (h_domain_check(x, mu) != HDomain::ok) continue;
        CHECK(std::abs(h_mu(x, mu) - h_mu(-x, mu)) < 1e-15);
    }
    // |h| = O(|x|^-2): ratio roughly constant when x doubles
    double r1 = std::abs(h_mu(100.0, cplx(0.3, 0.1)));
    double r2 = std::abs(h_mu(200.0, cplx(0.3, 0.1)));
    CHECK(r1 / r2 == Catch::Approx(4.0).margin(0.1));
}

TEST_CASE("h_mu_p specializations", "[identities]") {
    CHECK(h_mu_p(3.0, cplx(0.5, 0.2), cplx(1.0 / 3.0)) == h_mu(3.0, cplx(0.5, 0.2)));
    // mu = 0 kills the weight dependence
    CHECK(h_mu_p(cplx(2.5, 1.0), 0.0, cplx(0.9, -0.4)) == h_mu_p(cplx(2.5, 1.0), 0.0, 0.1));
    // p = 1, mu = 1, x = 3: h = (1 - sqrt(1 - 4/9))/2 via independent arithmetic
    cplx direct = 0.5 * (1.0 - std::sqrt(1.0 - 4.0 / 9.0));
    CHECK(std::abs(h_mu_p(3.0, 1.0, 1.0) - direct) < 1e-15);
}

TEST_CASE("Fuchsian bridge: h_0 equals the length-spectrum summand", "[identities]") {
    for (int i = 0; i < 50; ++i) {
        double x = 2.0 + (50.0 - 2.0) * (i + 1) / 50.0;
        double l = 2.0 * std::acosh(x / 2.0);
        double expected = 1.0 / (1.0 + std::exp(l));
        CHECK(std::abs(h_mu(x, 0.0) - cplx(expected)) < 1e-12);
    }
}

TEST_CASE("z_branch picks the small root", "[identities]") {
    CHECK(std::abs(z_branch(3.0, 3.0, 0.0) - cplx(3.0)) < 1e-14);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> d(-4.0, 4.0);
    for (int i = 0; i < 100; ++i) {
        cplx x(d(rng), d(rng)), y(d(rng), d(rng)), mu(d(rng) * 0.3, d(rng) * 0.3);
        if (std::abs(x) < 0.2 || std::abs(y) < 0.2) continue;
        cplx z = z_branch(x, y, mu);
        cplx residual = z * z - x * y * z + x * x + y * y - mu;
        CHECK(std::abs(residual) <
              1e-12 * std::max({1.0, std::abs(z * z), std::abs(x * y * z)}));
        CHECK(std::abs(z - z_branch(y, x, mu)) < 1e-13 * std::max(1.0, std::abs(z)));
    }
}

TEST_CASE("edge values on the Fuchsian seed", "[identities]") {
    auto m = MarkoffMap::from_seed(3, 3, 3);
    DirectedEdge inward = make_edge(Slope{0, 1}, Slope{1, 0}, normalize(-1, 1), Slope{1, 1});
    CHECK(std::abs(psi_edge_value(inward, m) - cplx(1.0 / 3.0)) < 1e-15);
    CHECK(std::abs(psi_edge_value(reverse(inward), m) - cplx(2.0 / 3.0)) < 1e-15);

    // vertex sum: three inward edges at the root
    cplx total = 0.0;
    for (int k = 0; k < 3; ++k) {
        const Slope& head = m.root().regions[k];
        const Slope& f1 = m.root().regions[(k + 1) % 3];
        const Slope& f2 = m.root().regions[(k + 2) % 3];
        total += psi_edge_value(make_edge(f1, f2, fourth_region(f1, f2, head), head), m);
    }
    CHECK(std::abs(total - 1.0) < 1e-14);
}

TEST_CASE("local relations on a complex seed", "[identities]") {
    auto m = complex_test_map();
    cplx mu = m.mu();

    // reversal and vertex sums over the radius-4 ball
    for (const auto& nd : ball_nodes(4, m.root())) {
        cplx vertex_total = 0.0;
        for (int i = 0; i < 3; ++i) {
            const Slope& head = nd.v.regions[i];
            const Slope& f1 = nd.v.regions[(i + 1) % 3];
            const Slope& f2 = nd.v.regions[(i + 2) % 3];
            DirectedEdge e = make_edge(f1, f2, fourth_region(f1, f2, head), head);
            cplx a = psi_edge_value(e, m);
            cplx b = psi_edge_value(reverse(e), m);
            CHECK(std::abs(a + b - 1.0) < 1e-12);
            vertex_total += a;
        }
        CHECK(std::abs(vertex_total - 1.0) < 1e-12);
    }

    // circular-set sums are exactly 1 for n <= 6
    for (int n = 0; n <= 6; ++n) {
        cplx total = 0.0;
        for (const DirectedEdge& e : circular_set(n, m.root())) total += psi_edge_value(e, m);
        CHECK(std::abs(total - 1.0) < 1e-12);
    }
    (void)mu;
}

TEST_CASE("second-proof finite identity: plain edge values minus vertex terms", "[identities]") {
    auto m = complex_test_map();
    cplx mu = m.mu();
    for (int n = 0; n <= 5; ++n) {
        cplx edge_total = 0.0;
        for (const DirectedEdge& e : circular_set(n, m.root())) {
            cplx x = m.trace(e.flank[0]), y = m.trace(e.flank[1]), z = m.trace(e.head_region);
            edge_total += z / (x * y);
        }
        cplx vertex_total = 0.0;
        for (const auto& nd : ball_nodes(n, m.root())) {
            cplx a = m.trace(nd.v.regions[0]), b = m.trace(nd.v.regions[1]),
                 c = m.trace(nd.v.regions[2]);
            vertex_total += mu / (a * b * c);
        }
        CHECK(std::abs(edge_total - vertex_total - 1.0) < 1e-12);
    }
}

TEST_CASE("weighted edge values generalize the plain ones", "[identities]") {
    auto m = complex_test_map();
    Weights uniform{};
    for (const auto& nd : ball_nodes(2, m.root())) {
        auto vals = weighted_edge_values(nd.v, m, uniform);
        cplx sum = vals[0] + vals[1] + vals[2];
        CHECK(std::abs(sum - 1.0) < 1e-12);
        for (int i = 0; i < 3; ++i) {
            const Slope& head = nd.v.regions[i];
            const Slope& f1 = nd.v.regions[(i + 1) % 3];
            const Slope& f2 = nd.v.regions[(i + 2) % 3];
            DirectedEdge e = make_edge(f1, f2, fourth_region(f1, f2, head), head);
            CHECK(std::abs(vals[parity_index(head) - 1] - psi_edge_value(e, m)) < 1e-13);
        }
    }

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    TreeVertex v = m.root();
    for (int trial = 0; trial < 100; ++trial) {
        cplx p1(d(rng), d(rng)), p2(d(rng), d(rng));
        Weights w = make_weights(p1, p2, 1.0 - p1 - p2);
        auto vals = weighted_edge_values(v, m, w);
        CHECK(std::abs(vals[0] + vals[1] + vals[2] - 1.0) < 1e-12);
        for (int i = 0; i < 3; ++i) {
            const Slope& head = v.regions[i];
            const Slope& f1 = v.regions[(i + 1) % 3];
            const Slope& f2 = v.regions[(i + 2) % 3];
            DirectedEdge e = make_edge(f1, f2, fourth_region(f1, f2, head), head);
            cplx a = weighted_edge_value(e, m, w);
            cplx b = weighted_edge_value(reverse(e), m, w);
            CHECK(std::abs(a + b - 1.0) < 1e-12);
        }
    }

    CHECK_THROWS_AS(make_weights(0.5, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("edge value domain guards", "[identities]") {
    auto zero = MarkoffMap::from_seed(0, cplx(2.5, 1.0), cplx(1.0, -2.0));
    DirectedEdge e = make_edge(Slope{0, 1}, Slope{1, 0},
                               fourth_region(Slope{0, 1}, Slope{1, 0}, Slope{1, 1}),
                               Slope{1, 1});
    CHECK_THROWS_AS(psi_edge_value(e, zero), std::domain_error);
}
