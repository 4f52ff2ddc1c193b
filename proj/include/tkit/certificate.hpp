#pragma once

#include "tkit/bounds.hpp"
#include "tkit/branch_bound.hpp"
#include "tkit/margin.hpp"

namespace tkit {

// Certified lower bound for the transversality margin over a ball:
// inf over the ball of margin_at >= margin. The bound subtracts
// lipschitz_slack from the grid infimum; when the map has antiholomorphic
// content (holomorphic_only false) the pointwise sigma already paid the
// dbar penalty, whose grid maximum is recorded.
struct TransversalityCertificate {
    Ball ball;
    double grid_spacing = 0.0;
    double margin = 0.0;
    double lipschitz_slack = 0.0;
    bool holomorphic_only = true;
    double dbar_penalty = 0.0;
    bool margin_clamped = false;  // negative computed margin clamped to 0
};

// Margin as a branch-and-bound objective with local coefficient-based
// Lipschitz constants.
class MarginObjective : public InfObjective {
  public:
    MarginObjective(const PolyMap& p, bool use_full_gradient)
        : p_(p),
          full_(use_full_gradient),
          jz_(p.dz_stack()),
          jzb_(p.dzbar_stack()) {}

    double eval(const CVec& z) const override {
        return margin_at(p_.jet(z), full_);
    }
    double lip(const Ball& cell) const override {
        double lv = derivative_bound(p_, cell, 1);
        double ls = derivative_bound(jz_, cell, 1);
        if (full_) ls += derivative_bound(jzb_, cell, 1);
        return std::max(lv, ls);
    }
    bool full() const { return full_; }

  private:
    PolyMap p_;
    bool full_;
    PolyMap jz_, jzb_;
};

// Grid-infimum certificate: margin = (inf over grid of margin_at) - Lip * cover.
TransversalityCertificate certify_transverse(const PolyMap& p, const Ball& ball,
                                             const GridSpec& grid,
                                             bool use_full_gradient);
inline TransversalityCertificate certify_transverse(const PolyMap& p, const Ball& ball,
                                                    const GridSpec& grid) {
    return certify_transverse(p, ball, grid, !p.purely_holomorphic());
}

// Same soundness mechanism with adaptive refinement; reaches much tighter
// bounds than a fixed grid when coefficients are large. Target is the level
// the caller wants certified; the returned margin may exceed it.
TransversalityCertificate certify_transverse_adaptive(
    const PolyMap& p, const Ball& ball, double target, bool use_full_gradient,
    const BranchBoundOptions& opts = {});

// The certificate for any map within C^1 distance eps of the certified one:
// margin drops by eps, clamped at zero (flagged void via margin_clamped).
TransversalityCertificate openness_shift(const TransversalityCertificate& cert,
                                         double eps_c1);

}  // namespace tkit
