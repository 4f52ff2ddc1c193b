#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "tkit/bounds.hpp"
#include "tkit/prop3.hpp"

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

// Normalize a random holomorphic map to |f|_C1 <= 1 over the enlarged ball.
PolyMap normalized_random(std::mt19937_64& rng, int n, int deg) {
    PolyMap f = random_polymap(rng, n, 1, deg);
    Ball bp = Ball::unit(n).scaled(1.1);
    GridSpec g{bp, n == 1 ? 1.0 / 32.0 : 1.0 / 10.0};
    CNorms cn = c_norms(f, bp, g);
    return f.scaled(1.0 / (cn.c1_norm() * 1.01));
}

}  // namespace

TEST_CASE("auxiliary map of the identity") {
    PolyMap g = build_auxiliary(scalar1({{{1}, 1.0}}));
    CHECK(g.m() == 2);
    CVec z(1);
    z[0] = 0.37;
    CVec v = g(z);
    CHECK(std::abs(v[0]) < 1e-15);
    CHECK(std::abs(v[1] - 1.0) < 1e-15);
}

TEST_CASE("auxiliary map of the squaring map") {
    PolyMap g = build_auxiliary(scalar1({{{2}, 1.0}}));
    CVec z(1);
    z[0] = Complex(0.4, -0.2);
    CVec v = g(z);
    CHECK(std::abs(v[0] + z[0] * z[0]) < 1e-14);
    CHECK(std::abs(v[1] - 2.0 * z[0]) < 1e-14);
}

TEST_CASE("auxiliary map of a bilinear map") {
    PolyMap g = build_auxiliary(scalar1({{{1, 1}, 1.0}}));
    CHECK(g.m() == 3);
    CVec z(2);
    z[0] = Complex(0.3, 0.1);
    z[1] = Complex(-0.2, 0.4);
    CVec v = g(z);
    CHECK(std::abs(v[0] + z[0] * z[1]) < 1e-14);
    CHECK(std::abs(v[1] - z[1]) < 1e-14);
    CHECK(std::abs(v[2] - z[0]) < 1e-14);
}

TEST_CASE("auxiliary identity holds coefficient-wise for 1000 random maps") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 1 + trial % 2;
        PolyMap f = random_polymap(rng, n, 1, 4, trial % 2 == 0, 0.5);
        PolyMap g = build_auxiliary(f);
        PolyMap recon = g.component(0);
        for (int i = 0; i < n; ++i) recon = recon + g.component(i + 1).mul_z(i);
        PolyMap diff = recon - f;
        double scale = 0.0;
        for (const auto& [idx, c] : f.coeffs()) scale = std::max(scale, c.norm());
        for (const auto& [idx, c] : diff.coeffs()) CHECK(c.norm() <= 1e-13 * scale);
        for (int i = 0; i < n; ++i) {
            PolyMap want = f.d_z(i);
            PolyMap got = g.component(i + 1);
            CHECK((want - got).empty());
        }
        if (f.purely_holomorphic()) CHECK(g.purely_holomorphic());
    }
}

TEST_CASE("offset search against a constant map") {
    PolyMap g(1, 2);
    g.add_term(MultiIndex(1), CVec(CVec::Zero(2)));
    GridSpec grid{Ball::unit(1), 1.0 / 32.0};
    OffsetOutcome out = find_offset(g, 0.1, grid, 256, 5, 0.07);
    REQUIRE(out.ok);
    CHECK(out.w.norm() <= 0.1 + 1e-12);
    CHECK(out.alpha >= 0.07);
    CHECK(out.alpha <= 0.1 + 1e-9);
}

TEST_CASE("certified clearance matches a dense one-dimensional scan") {
    PolyMap g = build_auxiliary(scalar1({{{2}, 1.0}}));
    CVec w(2);
    w << Complex(-0.1, 0.0), Complex(0.0, 0.0);
    double oracle = 1e18;
    for (int i = -800; i <= 800; ++i)
        for (int j = -800; j <= 800; j += 8) {
            Complex z(i / 800.0, j / 800.0);
            if (std::abs(z) > 1.0) continue;
            CVec zv(1);
            zv[0] = z;
            oracle = std::min(oracle, (g(zv) - w).norm());
        }
    BranchBoundOptions opts;
    opts.max_cells = 60000;
    double cert = certified_clearance_adaptive(g, w, Ball::unit(1), 1e9, opts);
    CHECK(cert <= oracle + 1e-12);
    CHECK(cert >= oracle - 0.01);
    CHECK(cert == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("image tube of the auxiliary map fills little of the ball") {
    PolyMap g = build_auxiliary(scalar1({{{2}, 1.0}}));
    GridSpec grid{Ball::unit(1), 1.0 / 48.0};
    std::vector<CVec> image;
    grid.visit([&](const CVec& z) { image.push_back(g(z)); });
    std::mt19937_64 rng(7);
    const double delta = 0.1, eta = 0.01;
    int inside = 0, total = 20000;
    for (int i = 0; i < total; ++i) {
        CVec w = random_point_in_ball(rng, 2, delta);
        double best = 1e18;
        for (const auto& v : image) best = std::min(best, (v - w).norm());
        if (best <= eta) ++inside;
    }
    CHECK(inside < total / 2);
}

TEST_CASE("rank-one perturbation accepts an already transverse map") {
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(1), 1.0 / 64.0};
    PerturbationResult res =
        perturb_rank_one(scalar1({{{1}, 1.0}}), 0.1, profile, grid, 42);
    CHECK(res.w.norm() == 0.0);
    CHECK(res.achieved_margin >= 0.9);
    CHECK(res.chain_ok);
}

TEST_CASE("rank-one perturbation of the squaring map") {
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(1), 1.0 / 64.0};
    PolyMap f = scalar1({{{2}, 1.0}});
    PerturbationResult res = perturb_rank_one(f, 0.1, profile, grid, 42);
    CHECK(res.w.norm() <= 0.1 + 1e-12);
    CHECK(res.achieved_margin >= res.eta);

    // The perturbed map z^2 - w0 - w1 z has two simple zeros, both with
    // derivative above the certified margin.
    Complex w0 = res.w[0], w1 = res.w[1];
    Complex disc = std::sqrt(w1 * w1 + 4.0 * w0);
    Complex r1 = (w1 + disc) / 2.0, r2 = (w1 - disc) / 2.0;
    CHECK(std::abs(r1 - r2) > 1e-4);
    for (Complex r : {r1, r2}) {
        CHECK(std::abs(r * r - w0 - w1 * r) < 1e-12);
        if (std::abs(r) <= 1.0)
            CHECK(std::abs(2.0 * r - w1) >= res.achieved_margin - 1e-9);
    }
}

TEST_CASE("antiholomorphic noise within budget barely moves the margin") {
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(1), 1.0 / 64.0};
    PolyMap clean = scalar1({{{2}, 1.0}});
    PolyMap noisy = clean;
    {
        MultiIndex idx(1);
        idx.zbarexp(0) = 1;
        noisy.add_term(idx, Complex(0.001, 0.0));
    }
    PerturbationResult res = perturb_rank_one(clean, 0.1, profile, grid, 42);
    PolyMap clean_shift = clean.affine_shift(res.w);
    PolyMap noisy_shift = noisy.affine_shift(res.w);
    TransversalityCertificate mc = certify_transverse(clean_shift, grid.ball, grid, false);
    TransversalityCertificate mn = certify_transverse(noisy_shift, grid.ball, grid, true);
    CHECK(std::abs(mc.margin - mn.margin) <= 0.002 + 1e-6);

    PerturbationResult full = perturb_rank_one(noisy, 0.1, profile, grid, 42);
    CHECK(full.achieved_margin >= full.eta);
}

TEST_CASE("hypothesis violations are reported with the offending norm") {
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(1), 1.0 / 64.0};
    CHECK_THROWS_AS(perturb_rank_one(scalar1({{{1}, 100.0}}), 0.1, profile, grid, 1),
                    HypothesisViolation);
    PolyMap noisy = scalar1({{{2}, 1.0}});
    {
        MultiIndex idx(1);
        idx.zbarexp(0) = 1;
        noisy.add_term(idx, Complex(0.3, 0.0));
    }
    CHECK_THROWS_AS(perturb_rank_one(noisy, 0.1, profile, grid, 1),
                    HypothesisViolation);
    CHECK_THROWS_AS(perturb_rank_one(scalar1({{{2}, 1.0}}), 0.5, profile, grid, 1),
                    std::invalid_argument);
}

TEST_CASE("proof chain of the perturbed map holds at every grid point") {
    std::mt19937_64 rng(211);
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(1), 1.0 / 64.0};
    for (int trial = 0; trial < 10; ++trial) {
        PolyMap f = normalized_random(rng, 1, 4);
        PerturbationResult res = perturb_rank_one(f, 0.1, profile, grid, 300 + trial);
        PolyMap shifted = f.affine_shift(res.w);
        double alpha = res.alpha;
        grid.visit([&](const CVec& z) {
            JetSample J = shifted.jet(z);
            double value = J.value.norm();
            double deriv = J.dz.norm();
            if (deriv < 0.25 * alpha) CHECK(value > 0.5 * alpha - 1e-9);
            if (value <= 0.5 * alpha) CHECK(deriv >= 0.25 * alpha - 1e-9);
        });
    }
}

TEST_CASE("perturbation cannot manufacture margin beyond the offset size") {
    std::mt19937_64 rng(223);
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(1), 1.0 / 64.0};
    for (int trial = 0; trial < 5; ++trial) {
        PolyMap f = normalized_random(rng, 1, 4);
        PerturbationResult res = perturb_rank_one(f, 0.1, profile, grid, 400 + trial);
        PolyMap shifted = f.affine_shift(res.w);
        double inf_f = 1e18, inf_shift = 1e18;
        grid.visit([&](const CVec& z) {
            inf_f = std::min(inf_f, margin_at(f.jet(z), false));
            inf_shift = std::min(inf_shift, margin_at(shifted.jet(z), false));
        });
        CHECK(inf_shift <= inf_f + std::sqrt(2.0) * 0.1 + 1e-9);
    }
}

TEST_CASE("constant family keeps a constant offset") {
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(1), 1.0 / 64.0};
    std::vector<PolyMap> family(5, scalar1({{{2}, 1.0}}));
    FamilyResult res = perturb_rank_one_family(family, 0.1, profile, grid, 42);
    REQUIRE(res.ok);
    for (const auto& step : res.steps)
        CHECK((step.w - res.steps[0].w).norm() == 0.0);
    CHECK(res.max_jump == 0.0);
}

TEST_CASE("drifting family tracks with small jumps and interpolation margin") {
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(1), 1.0 / 64.0};
    const double eta = profile.eta(0.1);
    const double drift = 0.01;
    int steps = static_cast<int>(std::ceil(drift / (eta / 4.0))) + 1;
    std::vector<PolyMap> family;
    for (int i = 0; i < steps; ++i) {
        double t = static_cast<double>(i) / (steps - 1);
        family.push_back(scalar1({{{2}, 1.0}, {{0}, Complex(-drift * t, 0.0)}}));
    }
    FamilyResult res = perturb_rank_one_family(family, 0.1, profile, grid, 7);
    REQUIRE(res.ok);
    CHECK(res.max_jump <= 0.1 / 4.0 + 1e-12);
    for (double lb : res.segment_margin_lb) CHECK(lb >= eta / 2.0);
}

TEST_CASE("family through a degenerate member still succeeds") {
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(1), 1.0 / 64.0};
    const double eta = profile.eta(0.1);
    const double amp = 0.004;
    int steps = static_cast<int>(std::ceil(2 * amp / (eta / 4.0))) + 1;
    std::vector<PolyMap> family;
    for (int i = 0; i < steps; ++i) {
        double t = static_cast<double>(i) / (steps - 1);
        Complex c(-amp + 2 * amp * t, 0.0);  // crosses 0 mid-family
        family.push_back(scalar1({{{2}, 1.0}, {{0}, c}}));
    }
    FamilyResult res = perturb_rank_one_family(family, 0.1, profile, grid, 11);
    REQUIRE(res.ok);
    for (double lb : res.segment_margin_lb) CHECK(lb >= eta / 2.0);
}

TEST_CASE("family precondition is enforced") {
    ConstantsProfile profile;
    GridSpec grid{Ball::unit(1), 1.0 / 64.0};
    std::vector<PolyMap> family{scalar1({{{2}, 1.0}}),
                                scalar1({{{2}, 1.0}, {{0}, Complex(-0.05, 0.0)}})};
    CHECK_THROWS_AS(perturb_rank_one_family(family, 0.1, profile, grid, 1),
                    HypothesisViolation);
}
