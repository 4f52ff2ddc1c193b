#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "tkit/bounds.hpp"
#include "tkit/prop4.hpp"

using namespace tkit;
using namespace tkit::testing;

namespace {

PolyMap scalar1(std::initializer_list<std::pair<std::vector<int>, Complex>> zs) {
    int n = static_cast<int>(zs.begin()->first.size());
    PolyMap p(n, 1);
    for (const auto& [e, c] : zs) {
        MultiIndex idx(n);
        for (int i = 0; i < n; ++i) idx.zexp(i) = e[i];
        p.add_term(idx, c);
    }
    p.normalize();
    return p;
}

// (z1^2, z2^2) and friends.
PolyMap diag_squares() {
    PolyMap p(2, 2);
    MultiIndex a(2), b(2);
    a.zexp(0) = 2;
    b.zexp(1) = 2;
    CVec ca(2), cb(2);
    ca << Complex(1, 0), Complex(0, 0);
    cb << Complex(0, 0), Complex(1, 0);
    p.add_term(a, ca);
    p.add_term(b, cb);
    return p;
}

PolyMap identity2() {
    PolyMap p(2, 2);
    MultiIndex a(2), b(2);
    a.zexp(0) = 1;
    b.zexp(1) = 1;
    CVec ca(2), cb(2);
    ca << Complex(1, 0), Complex(0, 0);
    cb << Complex(0, 0), Complex(1, 0);
    p.add_term(a, ca);
    p.add_term(b, cb);
    return p;
}

}  // namespace

TEST_CASE("degree bound formula") {
    CHECK(degree_bound(2, 2) == 4);
    CHECK(degree_bound(2, 3) == 6);
    CHECK(degree_bound(4, 3) == 108);
    CHECK_THROWS_AS(degree_bound(2, 1), std::invalid_argument);
}

TEST_CASE("dimension count on pinned instances") {
    CHECK(dimension_count_check(2, 2, 4));    // 15 > 9
    CHECK(dimension_count_check(2, 3, 6));    // 28 > 19
    CHECK(dimension_count_check(3, 2, 12));   // 455 > 325
}

TEST_CASE("dimension count across the full table") {
    for (int d = 2; d <= 5; ++d)
        for (int N = 2; N <= 6; ++N)
            CHECK(dimension_count_check(N, d, degree_bound(N, d)));
}

TEST_CASE("rank-one bad set matches the auxiliary map") {
    PolyMap h = scalar1({{{2}, 1.0}});
    BadSetParam bad = build_bad_set(h, 0.1);
    CHECK(bad.N == 2);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto s = bad.sample(rng, 0.1, false);
        CHECK(std::abs(s.w[0] + s.z[0] * s.z[0]) < 1e-12);
        CHECK(std::abs(s.w[1] - 2.0 * s.z[0]) < 1e-12);
        auto [r1, r2] = bad.residuals(s.z, s.w);
        CHECK(r1 < 1e-12);
        CHECK(r2 < 1e-12);
    }
}

TEST_CASE("bad-set membership for a rank-two map") {
    PolyMap h = diag_squares();
    BadSetParam bad = build_bad_set(h, 0.1);
    CHECK(bad.N == 6);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        auto s = bad.sample(rng, 0.1, trial % 2 == 0);
        auto [r1, r2] = bad.residuals(s.z, s.w);
        CHECK(r1 < 1e-10);
        CHECK(r2 < 1e-10);
        // The shifted jacobian is rank deficient: its determinant vanishes.
        JetSample J = h.jet(s.z);
        CMat M = J.dz;
        for (int i = 0; i < 2; ++i) M.col(i) -= s.w.segment(2 * (i + 1), 2);
        CHECK(std::abs(M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0)) < 1e-10);
    }
}

TEST_CASE("bad-set membership across random maps up to n = 3") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 1 + trial % 3;
        int m = 1 + (trial / 3) % n;
        PolyMap h = random_polymap(rng, n, m, 4);
        if (h.degree() < 2) continue;
        BadSetParam bad = build_bad_set(h, 0.1);
        for (int s = 0; s < 30; ++s) {
            auto smp = bad.sample(rng, 0.1, s % 2 == 0);
            auto [r1, r2] = bad.residuals(smp.z, smp.w);
            double scale = std::max(1.0, smp.w.norm());
            CHECK(r1 < 1e-10 * scale);
            CHECK(r2 < 1e-10 * scale);
        }
    }
}

TEST_CASE("covering budget formula and limits") {
    CoveringBudget b = covering_budget(2, 3, 0.1, 0.001, 1.0);
    CHECK(b.D == 6);
    CHECK(b.M == doctest::Approx(6.0e4));

    CoveringBudget tiny = covering_budget(2, 3, 0.1, 1e-6, 1.0);
    CHECK(tiny.Z_volume_fraction < 1e-6);
    CHECK(tiny.feasible);

    CoveringBudget d2 = covering_budget(2, 2, 0.1, 0.001, 1.0);
    CoveringBudget d4 = covering_budget(2, 4, 0.1, 0.001, 1.0);
    CHECK(d4.M / d2.M == doctest::Approx(2.0));

    CHECK_THROWS_AS(covering_budget(2, 3, 0.1, 0.2, 1.0), std::invalid_argument);
}

TEST_CASE("forward certification at a given level") {
    GridSpec grid{Ball::unit(1), 1.0 / 64.0};
    CVec w0 = CVec::Zero(2);
    CHECK(lemma3_certify(scalar1({{{1}, 1.0}}), w0, 0.5, grid));
    CHECK_FALSE(lemma3_certify(scalar1({{{2}, 1.0}}), w0, 0.01, grid));
}

TEST_CASE("witness construction on the squaring map") {
    PolyMap h = scalar1({{{2}, 1.0}});
    CVec w = CVec::Zero(2);
    CVec z(1), v(1);
    z[0] = 0.1;
    v[0] = 1.0;
    CVec u = lemma3_witness(h, z, v, w);
    CHECK(std::abs(u[1] - 0.2) < 1e-14);
    CHECK(std::abs(u[0] + 0.01) < 1e-14);
    PolyMap hat = h.affine_shift(CVec(w + u));
    JetSample J = hat.jet(z);
    CHECK(J.value.norm() < 1e-14);
    CHECK(std::abs((v.adjoint() * J.dz)(0, 0)) < 1e-14);
}

TEST_CASE("witness with a degenerate point returns zero") {
    PolyMap h = scalar1({{{2}, 1.0}});
    CVec w(2);
    w << Complex(-0.25, 0.0), Complex(1.0, 0.0);  // shifted map (z - 1/2)^2
    CVec z(1), v(1);
    z[0] = 0.5;
    v[0] = 1.0;
    CVec u = lemma3_witness(h, z, v, w);
    CHECK(u.norm() < 1e-14);
}

TEST_CASE("witness norm bound with the minimizing direction") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 1 + trial % 3;
        int m = 1 + (trial / 3) % n;
        PolyMap h = random_polymap(rng, n, m, 4);
        CVec w = random_point_in_ball(rng, m * (n + 1), 0.25);
        CVec z = random_point_in_ball(rng, n, 1.0);
        CVec v = min_singular_direction(h, z, w);
        CVec u = lemma3_witness(h, z, v, w);

        PolyMap shifted = h.affine_shift(w);
        JetSample J = shifted.jet(z);
        double margin = std::max(J.value.norm(), min_singular_value(J.dz));
        CHECK(u.norm() < 3.0 * margin + 1e-12);

        PolyMap hat = h.affine_shift(CVec(w + u));
        JetSample Jh = hat.jet(z);
        double scale = std::max(1.0, w.norm() + u.norm());
        CHECK(Jh.value.norm() <= 1e-10 * scale);
        CHECK((v.adjoint() * Jh.dz).norm() <= 1e-10 * scale);
    }
}

TEST_CASE("certification follows from sampled bad-set clearance") {
    std::mt19937_64 rng(37);
    GridSpec grid{Ball::unit(1), 1.0 / 48.0};
    int tested = 0;
    for (int trial = 0; trial < 200 && tested < 40; ++trial) {
        PolyMap h = random_polymap(rng, 1, 1, 3);
        Ball bp = Ball::unit(1).scaled(1.1);
        CNorms cn = c_norms(h, bp, GridSpec{bp, 1.0 / 24.0});
        h = h.scaled(1.0 / (cn.c1_norm() * 1.01));
        if (h.degree() < 2) continue;
        BadSetParam bad = build_bad_set(h, 0.25);
        std::mt19937_64 srng(trial);
        std::vector<CVec> cloud;
        for (int s = 0; s < 4000; ++s)
            cloud.push_back(bad.sample(srng, 0.25, s % 2 == 0).w);
        CVec w = random_point_in_ball(rng, 2, 0.2);
        double dist = 1e18;
        for (const auto& s : cloud) dist = std::min(dist, (s - w).norm());
        double alpha = dist / 3.5;
        if (alpha < 2e-3) continue;
        CHECK(lemma3_certify(h, w, alpha, grid));
        ++tested;
    }
    CHECK(tested == 40);
}

TEST_CASE("rank-m solver agrees with the rank-one solver for m = 1") {
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(1), 1.0 / 64.0};
    PolyMap f = scalar1({{{2}, 1.0}});
    PerturbationResult one = perturb_rank_one(f, 0.1, profile, grid, 42);
    PerturbationResult many = perturb_rank_m(f, 0.1, profile, grid, 42);
    CHECK(many.achieved_margin >= many.eta);
    double ratio = one.achieved_margin / many.achieved_margin;
    CHECK(ratio < 4.0);
    CHECK(ratio > 0.25);
}

TEST_CASE("rank-m perturbation of a diagonal quadratic pair") {
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(2), 1.0 / 16.0};
    PolyMap f = diag_squares();
    PerturbationResult res = perturb_rank_m(f, 0.1, profile, grid, 7);
    CHECK(res.w.norm() <= 0.1 + 1e-12);
    CHECK(res.achieved_margin >= res.eta);

    // Newton count of the perturbed zero set: four simple roots.
    PolyMap shifted = f.affine_shift(res.w);
    std::vector<CVec> roots;
    for (int s0 = -1; s0 <= 1; s0 += 2)
        for (int s1 = -1; s1 <= 1; s1 += 2) {
            CVec y(2);
            y[0] = Complex(0.3 * s0, 0.1);
            y[1] = Complex(0.3 * s1, -0.1);
            for (int it = 0; it < 60; ++it) {
                JetSample J = shifted.jet(y);
                if (J.value.norm() < 1e-12) break;
                CVec step = J.dz.colPivHouseholderQr().solve(CVec(-J.value));
                y += step;
            }
            if (shifted(y).norm() > 1e-10) continue;
            bool dup = false;
            for (const auto& r : roots)
                if ((r - y).norm() < 1e-6) dup = true;
            if (!dup) roots.push_back(y);
        }
    CHECK(roots.size() == 4);
    for (const auto& r : roots)
        CHECK(min_singular_value(shifted.jet(r).dz) > 0.0);
}

TEST_CASE("already transverse pair is left alone") {
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(2), 1.0 / 16.0};
    PerturbationResult res = perturb_rank_m(identity2(), 0.1, profile, grid, 7);
    CHECK(res.w.norm() == 0.0);
    CHECK(res.achieved_margin >= 0.7);
}

TEST_CASE("rank-m family tracking") {
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(2), 1.0 / 12.0};
    std::vector<PolyMap> family(3, diag_squares());
    FamilyResult constant = perturb_rank_m_family(family, 0.1, profile, grid, 5);
    REQUIRE(constant.ok);
    CHECK(constant.max_jump == 0.0);

    const double eta = constant.eta;
    const double drift = 0.002;
    int steps = static_cast<int>(std::ceil(drift / (eta / 4.0))) + 1;
    std::vector<PolyMap> moving;
    for (int i = 0; i < steps; ++i) {
        double t = static_cast<double>(i) / (steps - 1);
        PolyMap f = diag_squares();
        CVec c(2);
        c << Complex(-drift * t, 0.0), Complex(0.0, 0.0);
        f.add_term(MultiIndex(2), c);
        f.normalize();
        moving.push_back(f);
    }
    FamilyResult res = perturb_rank_m_family(moving, 0.1, profile, grid, 5);
    REQUIRE(res.ok);
    CHECK(res.max_jump <= 0.1 / 4.0 + 1e-12);
    for (double lb : res.segment_margin_lb) CHECK(lb >= res.eta / 2.0);
}
