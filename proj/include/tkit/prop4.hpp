#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "tkit/prop3.hpp"

namespace tkit {

// Degree bound N * d^(N-1) for the hypersurface containing the image of the
// degeneracy parametrization. Requires N >= 2 and d >= 2.
std::int64_t degree_bound(int N, int d);

// Exact check that polynomials of degree <= D in N variables outnumber
// polynomials of degree <= d*D in N-1 variables:
// C(D+N, N) > C(d*D+N-1, N-1), evaluated in arbitrary precision.
bool dimension_count_check(int N, int d, std::int64_t D);

// Parametrization of the set of affine offsets w for which
// h - w0 - sum w_i z_i acquires a degenerate zero somewhere in the ball:
// every in-box parameter maps to a w with vanishing shifted value and
// rank-deficient shifted jacobian at its z.
struct BadSetParam {
    PolyMap h;
    int N = 0;  // m*(n+1)
    Ball zball;
    double theta_bound = 0.0;
    double lambda_bound = 0.0;

    int m() const { return h.m(); }
    int n() const { return h.n(); }

    // w packed [w0 | w1 | ... | wn] for parameters (z, theta, lambda);
    // theta is (m-1) x n, lambda has m-1 entries (both empty when m == 1).
    CVec eval(const CVec& z, const CMat& theta, const CVec& lambda) const;

    // Residuals of the two defining conditions for w at z:
    // value residual |h(z) - w0 - sum w_i z_i| and smallest singular value
    // of (dh(z) - wvec).
    std::pair<double, double> residuals(const CVec& z, const CVec& w) const;

    struct Sample {
        CVec z;
        CMat theta;
        CVec lambda;
        CVec w;
    };
    // In-box sample; bias_into_ball steers w toward the search ball of
    // radius delta (scoring aid; membership holds either way).
    Sample sample(std::mt19937_64& rng, double delta, bool bias_into_ball) const;
};

BadSetParam build_bad_set(const PolyMap& h, double delta = 0.25);

struct CoveringBudget {
    int N = 0;
    int d = 0;
    std::int64_t D = 0;
    double delta = 0.0, eta = 0.0;
    double C = 1.0;        // packing constant
    double c_approx = 1.0; // approximation constant in the tube radius
    double M = 0.0;        // number of eta-balls covering the danger zone
    double Z_volume_fraction = 0.0;
    bool feasible = true;
};

CoveringBudget covering_budget(int N, int d, double delta, double eta, double C,
                               double c_approx = 1.0);

// Forward check: certified margin of h - w0 - sum w_i z_i at level alpha.
bool lemma3_certify(const PolyMap& h, const CVec& w, double alpha,
                    const GridSpec& grid);

// Witness construction: given a point z and unit vector v, the offset u with
// hat h = h - (w0+u0) - sum (w_i+u_i) z_i vanishing at z with v-degenerate
// jacobian. With v the minimizing singular direction, |u| < 3 * margin_at.
CVec lemma3_witness(const PolyMap& h, const CVec& z, const CVec& v, const CVec& w);

// Minimizing left singular direction of the shifted jacobian at z.
CVec min_singular_direction(const PolyMap& h, const CVec& z, const CVec& w);

// Higher-rank perturbation (m <= n): truncate, search the delta-ball of
// C^{m(n+1)} scored by distance to the sampled bad set, certify margins.
PerturbationResult perturb_rank_m(const PolyMap& f, double delta,
                                  const ConstantsProfile& profile,
                                  const GridSpec& grid, std::uint64_t seed,
                                  int budget = 512);

FamilyResult perturb_rank_m_family(const std::vector<PolyMap>& family, double delta,
                                   const ConstantsProfile& profile,
                                   const GridSpec& grid, std::uint64_t seed,
                                   int budget = 256);

}  // namespace tkit
