#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tkit/certificate.hpp"
#include "tkit/errors.hpp"
#include "tkit/qmc.hpp"

namespace tkit {

// Calibration of the margin target eta(delta) = delta * log(1/delta)^-p / safety.
// The certificate produced by a solver, not this formula, carries the
// guarantee; the profile only sets search targets.
struct ConstantsProfile {
    int p_exponent = 2;
    double safety = 8.0;
    double c_approx = 1.0;  // measured |h - f|_C1 / eta when truncation runs

    double eta(double delta) const {
        if (!(delta > 0.0 && delta < 0.25))
            throw std::invalid_argument("delta must lie in (0, 1/4)");
        if (p_exponent < 1) throw std::invalid_argument("p_exponent must be >= 1");
        return delta * std::pow(std::log(1.0 / delta), -p_exponent) / safety;
    }
};

// Affine offset w in C^{m(n+1)}, packed [w0 | w1 | ... | wn], together with
// the certified margin of f - w0 - sum w_i z_i.
struct PerturbationResult {
    CVec w;
    double delta = 0.0;
    double achieved_margin = 0.0;
    TransversalityCertificate certificate;
    int attempts = 0;

    // Diagnostics surfaced so the eta < alpha/8 inequality is checked at
    // runtime instead of assumed.
    double alpha = 0.0;      // certified clearance of the auxiliary map
    double eta = 0.0;        // margin target
    double aux_scale = 1.0;  // certified C0 bound of the auxiliary map
    bool chain_ok = false;   // eta <= alpha / 8
};

// Auxiliary map (f - sum z_i df/dz_i, df/dz_1, ..., df/dz_n): the 1-jet of a
// scalar f written in the affine frame. Coefficient-exact; purely
// holomorphic inputs give purely holomorphic output.
PolyMap build_auxiliary(const PolyMap& f);

// Certified lower bound on inf over the ball of |g - w|.
double certified_clearance(const PolyMap& g, const CVec& w, const Ball& ball,
                           const GridSpec& grid);
double certified_clearance_adaptive(const PolyMap& g, const CVec& w, const Ball& ball,
                                    double target,
                                    const BranchBoundOptions& opts = {});

struct OffsetOutcome {
    bool ok = false;
    CVec w;
    double alpha = 0.0;  // certified clearance of the returned w
    int attempts = 0;
    double best_alpha = 0.0;  // best candidate seen (diagnostics on failure)
    CVec best_w;
};

// Search the delta-ball for an offset w with certified clearance
// inf_B |g - w| >= alpha_min. Candidates come from a seeded low-discrepancy
// sequence, scored by distance to the sampled image of g and certified
// best-first. Failure is an outcome value carrying the best candidate.
OffsetOutcome find_offset(const PolyMap& g, double delta, const GridSpec& grid,
                          int budget, std::uint64_t seed, double alpha_min);

// Rank-one perturbation: find w with |w| <= delta such that
// f - w0 - sum w_i z_i has certified margin >= eta(delta) over the grid ball.
PerturbationResult perturb_rank_one(const PolyMap& f, double delta,
                                    const ConstantsProfile& profile,
                                    const GridSpec& grid, std::uint64_t seed,
                                    int budget = 512);

struct FamilyResult {
    std::vector<PerturbationResult> steps;
    // Certified lower bound for the margin of every interpolated parameter in
    // each consecutive segment.
    std::vector<double> segment_margin_lb;
    double max_jump = 0.0;
    double eta = 0.0;
    bool ok = false;
    int first_failing_segment = -1;
};

// One-parameter version: offsets move by at most delta/4 between consecutive
// family members and linear interpolation of w keeps margin >= eta/2.
FamilyResult perturb_rank_one_family(const std::vector<PolyMap>& family, double delta,
                                     const ConstantsProfile& profile,
                                     const GridSpec& grid, std::uint64_t seed,
                                     int budget = 256);

namespace detail {

// Shared path tracker for affine-offset families: re-anchors near the
// previous offset when the carried one loses its margin, then bounds the
// margin of every linearly interpolated offset.
FamilyResult affine_family_track(
    const std::vector<PolyMap>& family, double delta, const ConstantsProfile& profile,
    const GridSpec& grid, std::uint64_t seed, int budget,
    const std::function<PerturbationResult(const PolyMap&)>& anchor_solver);

}  // namespace detail

}  // namespace tkit
