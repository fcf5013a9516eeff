#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "markoff/matrices.hpp"

using namespace markoff;

namespace {

Mat2c random_sl2(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    // a, b, c free; d solves det = 1 (retry when a is too small)
    for (;;) {
        cplx a(d(rng), d(rng)), b(d(rng), d(rng)), c(d(rng), d(rng));
        if (std::abs(a) < 0.3) continue;
        cplx dd = (1.0 + b * c) / a;
        return {a, b, c, dd};
    }
}

}  // namespace

TEST_CASE("from_matrices on the identity pair", "[matrices]") {
    MatrixPair p{Mat2c{}, Mat2c{}};
    auto m = from_matrices(p);
    MarkoffTriple t = m.seed();
    CHECK(t.x == cplx(2.0));
    CHECK(t.y == cplx(2.0));
    CHECK(t.z == cplx(2.0));
    CHECK(m.mu() == cplx(4.0));
}

TEST_CASE("integral pair gives seed (2,2,1) with commutator trace 3", "[matrices]") {
    MatrixPair p{Mat2c{1, 1, 0, 1}, Mat2c{1, 0, -1, 1}};
    auto m = from_matrices(p);
    MarkoffTriple t = m.seed();
    CHECK(t.x == cplx(2.0));
    CHECK(t.y == cplx(2.0));
    CHECK(t.z == cplx(1.0));
    CHECK(m.mu() == cplx(5.0));
    // mu = tr(ABA^{-1}B^{-1}) + 2, computed directly on the matrices
    CHECK(std::abs(commutator_trace(p) - (m.mu() - 2.0)) < 1e-12);
}

TEST_CASE("determinant is validated", "[matrices]") {
    MatrixPair p{Mat2c{2, 0, 0, 2}, Mat2c{}};
    CHECK_THROWS_AS(from_matrices(p), std::invalid_argument);
}

TEST_CASE("conjugated pairs give the identical seed", "[matrices]") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        Mat2c A = random_sl2(rng), B = random_sl2(rng), G = random_sl2(rng);
        Mat2c Gi = inverse_sl2(G);
        MatrixPair p{A, B};
        MatrixPair q{mul(mul(G, A), Gi), mul(mul(G, B), Gi)};
        MarkoffTriple tp = from_matrices(p).seed();
        MarkoffTriple tq = from_matrices(q).seed();
        double scale = std::max({1.0, std::abs(tp.x), std::abs(tp.y), std::abs(tp.z)});
        CHECK(std::abs(tp.x - tq.x) < 1e-10 * scale);
        CHECK(std::abs(tp.y - tq.y) < 1e-10 * scale);
        CHECK(std::abs(tp.z - tq.z) < 1e-10 * scale);
    }
}

TEST_CASE("trace identity tr(AB^{-1}) = tr A tr B - tr AB", "[matrices]") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        Mat2c A = random_sl2(rng), B = random_sl2(rng);
        cplx lhs = mul(A, inverse_sl2(B)).trace();
        cplx rhs = A.trace() * B.trace() - mul(A, B).trace();
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("lift round-trips the seed traces", "[matrices]") {
    auto check_roundtrip = [](cplx x, cplx y, cplx z) {
        MatrixPair p = lift_to_matrices(x, y, z);
        CHECK(std::abs(p.A.det() - 1.0) < 1e-10);
        CHECK(std::abs(p.B.det() - 1.0) < 1e-10);
        MarkoffTriple t = from_matrices(p).seed();
        double scale = std::max({1.0, std::abs(x), std::abs(y), std::abs(z)});
        CHECK(std::abs(t.x - x) < 1e-10 * scale);
        CHECK(std::abs(t.y - y) < 1e-10 * scale);
        CHECK(std::abs(t.z - z) < 1e-10 * scale);
    };
    check_roundtrip(3, 3, 3);
    check_roundtrip(cplx(1, 1), 2, cplx(2, -1));
    check_roundtrip(0, 0, 0);  // the quaternionic character is irreducible

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int i = 0; i < 30; ++i) {
        cplx x(d(rng), d(rng)), y(d(rng), d(rng)), z(d(rng), d(rng));
        if (std::abs(markoff_mu(x, y, z) - 4.0) < 1e-3) continue;
        check_roundtrip(x, y, z);
    }
}

TEST_CASE("reducible characters are rejected by the lift", "[matrices]") {
    CHECK_THROWS_AS(lift_to_matrices(2, 2, 2), reducible_error);
    // 9 + 9 + 49 - 63 = 4, so (3,3,7) sits on the reducible locus too
    CHECK_THROWS_AS(lift_to_matrices(3, 3, 7), reducible_error);
}
