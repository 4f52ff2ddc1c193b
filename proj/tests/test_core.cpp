#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "tkit/bounds.hpp"
#include "tkit/json_io.hpp"
#include "tkit/linalg.hpp"

using namespace tkit;
using namespace tkit::testing;

namespace {

PolyMap scalar_map(int n, std::initializer_list<std::pair<MultiIndex, Complex>> terms) {
    PolyMap p(n, 1);
    for (const auto& [idx, c] : terms) p.add_term(idx, c);
    p.normalize();
    return p;
}

MultiIndex mono(int n, std::vector<int> z, std::vector<int> zb = {}) {
    MultiIndex idx(n);
    for (int i = 0; i < n; ++i) idx.zexp(i) = z[i];
    if (!zb.empty())
        for (int i = 0; i < n; ++i) idx.zbarexp(i) = zb[i];
    return idx;
}

// Central finite differences of the value along each real axis, combined
// into Wirtinger derivatives.
std::pair<CMat, CMat> fd_jacobians(const PolyMap& p, const CVec& z, double h) {
    const int n = p.n(), m = p.m();
    CMat dz(m, n), dzbar(m, n);
    for (int i = 0; i < n; ++i) {
        CVec zp = z, zm = z;
        zp[i] += h;
        zm[i] -= h;
        CVec dx = (p(zp) - p(zm)) / (2 * h);
        zp = z;
        zm = z;
        zp[i] += Complex(0, h);
        zm[i] -= Complex(0, h);
        CVec dy = (p(zp) - p(zm)) / (2 * h);
        dz.col(i) = 0.5 * (dx - Complex(0, 1) * dy);
        dzbar.col(i) = 0.5 * (dx + Complex(0, 1) * dy);
    }
    return {dz, dzbar};
}

}  // namespace

TEST_CASE("jet of the identity map") {
    PolyMap p = scalar_map(1, {{mono(1, {1}), 1.0}});
    CVec z(1);
    z[0] = 0.5;
    JetSample J = evaluate_jet(p, z);
    CHECK(std::abs(J.value[0] - 0.5) < 1e-15);
    CHECK(std::abs(J.dz(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(J.dzbar(0, 0)) == 0.0);
}

TEST_CASE("jet of |z|^2") {
    PolyMap p = scalar_map(1, {{mono(1, {1}, {1}), 1.0}});
    CVec z(1);
    z[0] = 1.0;
    JetSample J = evaluate_jet(p, z);
    CHECK(std::abs(J.value[0] - 1.0) < 1e-15);
    CHECK(std::abs(J.dz(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(J.dzbar(0, 0) - 1.0) < 1e-15);
}

TEST_CASE("jet dimension mismatch is rejected") {
    PolyMap p = scalar_map(1, {{mono(1, {1}), 1.0}});
    CVec z(2);
    z.setZero();
    CHECK_THROWS_AS(evaluate_jet(p, z), std::invalid_argument);
}

TEST_CASE("jet matches finite differences on a random degree-3 map") {
    std::mt19937_64 rng(11);
    PolyMap p = random_polymap(rng, 2, 1, 3, false);
    CVec z = random_point_in_ball(rng, 2, 0.8);
    JetSample J = evaluate_jet(p, z);
    auto [dz, dzbar] = fd_jacobians(p, z, 1e-5);
    CHECK((J.dz - dz).norm() < 1e-6);
    CHECK((J.dzbar - dzbar).norm() < 1e-6);
}

TEST_CASE("jet finite-difference property over 1000 random instances") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 1 + (trial % 2);
        PolyMap p = random_polymap(rng, n, 1, 3, trial % 3 != 0, 0.5);
        CVec z = random_point_in_ball(rng, n, 0.9);
        JetSample J = evaluate_jet(p, z);
        auto [dz, dzbar] = fd_jacobians(p, z, 1e-5);
        CHECK((J.dz - dz).norm() < 1e-6);
        CHECK((J.dzbar - dzbar).norm() < 1e-6);
    }
}

TEST_CASE("c_norms of linear and quadratic maps") {
    Ball ball = Ball::unit(1);
    GridSpec grid{ball, 1.0 / 64.0};

    PolyMap lin = scalar_map(1, {{mono(1, {1}), 1.0}});
    CNorms cn = c_norms(lin, ball, grid);
    CHECK(cn.c0 >= 1.0);
    CHECK(cn.c0 <= 1.05);
    CHECK(cn.c1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cn.dbar_c0 == 0.0);

    PolyMap sq = scalar_map(1, {{mono(1, {2}), 1.0}});
    CNorms cn2 = c_norms(sq, ball, grid);
    CHECK(cn2.c0 >= 1.0);
    CHECK(cn2.c0 <= 1.1);
    CHECK(cn2.c1 >= 2.0);
    CHECK(cn2.c1 <= 2.2);
}

TEST_CASE("c_norms dominates a 10x finer grid") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        PolyMap p = random_polymap(rng, 1, 1, 4, false);
        Ball ball = Ball::unit(1);
        GridSpec coarse{ball, 1.0 / 16.0};
        GridSpec fine{ball, 1.0 / 160.0};
        CNorms cert = c_norms(p, ball, coarse);
        double fine_max = 0.0;
        fine.visit([&](const CVec& z) { fine_max = std::max(fine_max, p(z).norm()); });
        CHECK(cert.c0 >= fine_max);
    }
}

TEST_CASE("c_norms is monotone in the ball") {
    std::mt19937_64 rng(29);
    PolyMap p = random_polymap(rng, 1, 1, 4, false);
    GridSpec g1{Ball::unit(1), 1.0 / 32.0};
    GridSpec g2{Ball::unit(1).scaled(1.3), 1.0 / 32.0};
    CNorms a = c_norms(p, g1.ball, g1);
    CNorms b = c_norms(p, g2.ball, g2);
    CHECK(b.c0 >= a.c0);
    CHECK(b.c1 >= a.c1);
    CHECK(b.c2 >= a.c2);
    CHECK(b.dbar_c0 >= a.dbar_c0);
    CHECK(b.dbar_c1 >= a.dbar_c1);
}

TEST_CASE("derivative_bound on monomials") {
    PolyMap sq = scalar_map(1, {{mono(1, {2}), 1.0}});
    CHECK(derivative_bound(sq, Ball::unit(1), 1) == doctest::Approx(2.0));
    CHECK(derivative_bound(sq, Ball::unit(1).scaled(2.0), 1) == doctest::Approx(4.0));
    CHECK_THROWS_AS(derivative_bound(sq, Ball::unit(1), 4), std::invalid_argument);
}

TEST_CASE("derivative_bound dominates sampled derivative maxima") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + (trial % 2);
        PolyMap p = random_polymap(rng, n, 1, 4);
        Ball ball = Ball::unit(n);
        double bound = derivative_bound(p, ball, 1);
        GridSpec grid{ball, 1.0 / 16.0};
        double sampled = 0.0;
        grid.visit([&](const CVec& z) {
            if ((z - ball.center).norm() > ball.radius) return;
            sampled = std::max(sampled, spectral_norm(p.jet(z).dz));
        });
        CHECK(bound >= sampled);
    }
}

TEST_CASE("truncate_to_degree keeps exact holomorphic content") {
    std::mt19937_64 rng(37);
    PolyMap p = random_polymap(rng, 2, 1, 3, true);
    Truncation t = truncate_to_degree(p, 3, Ball::unit(2));
    CHECK(t.err_c1 == 0.0);
    CHECK((t.h - p).empty());
}

TEST_CASE("truncate_to_degree bounds the antiholomorphic tail") {
    PolyMap p = scalar_map(1, {{mono(1, {1}), 1.0}, {mono(1, {0}, {1}), 0.01}});
    Truncation t = truncate_to_degree(p, 1, Ball::unit(1));
    CHECK(t.h.purely_holomorphic());
    CHECK(t.err_c1 >= 0.01);
    CHECK(t.err_c1 <= 0.02 + 1e-15);
}

TEST_CASE("truncate_to_degree coefficient-tail bound") {
    PolyMap p(1, 1);
    double fact = 1.0;
    for (int j = 0; j <= 6; ++j) {
        if (j > 0) fact *= j;
        p.add_term(mono(1, {j}), Complex(1.0 / fact, 0.0));
    }
    Truncation t = truncate_to_degree(p, 3, Ball::unit(1));
    double expected = 0.0;
    fact = 6.0;  // 3!
    for (int j = 4; j <= 6; ++j) {
        fact *= j;
        expected += (1.0 + j) / fact;
    }
    CHECK(t.err_c1 <= expected + 1e-12);
    CHECK(t.err_c1 > 0.0);
}

TEST_CASE("polymap json round trip preserves terms") {
    std::mt19937_64 rng(41);
    PolyMap p = random_polymap(rng, 2, 2, 3, false);
    Json j = to_json(p);
    PolyMap q = polymap_from_json(j);
    CHECK((p - q).empty());
    CHECK(j.dump() == to_json(q).dump());
}

TEST_CASE("polymap json rejects malformed input") {
    Json bad = {{"n", 1}, {"m", 1}, {"terms", {{{"zexp", {1, 2}}, {"zbarexp", {0}}, {"coeff", {{1.0, 0.0}}}}}}};
    CHECK_THROWS_AS(polymap_from_json(bad), SchemaError);
}

TEST_CASE("grid covers every ball point within the cover radius") {
    std::mt19937_64 rng(43);
    GridSpec grid{Ball::unit(2), 1.0 / 8.0};
    std::vector<CVec> pts = grid.points();
    for (int trial = 0; trial < 200; ++trial) {
        CVec z = random_point_in_ball(rng, 2, 1.0);
        double best = 1e9;
        for (const auto& g : pts) best = std::min(best, (g - z).norm());
        CHECK(best <= grid.cover_radius() + 1e-12);
    }
}
