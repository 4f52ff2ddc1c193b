#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "tkit/geometry.hpp"

namespace tkit {

// A scalar field together with local Lipschitz bounds, enough to certify a
// lower bound on its infimum over a ball by recursive box refinement.
struct InfObjective {
    virtual double eval(const CVec& z) const = 0;
    // Upper bound for the Lipschitz constant over the given ball.
    virtual double lip(const Ball& cell) const = 0;
    virtual ~InfObjective() = default;
};

struct CertifiedInf {
    double bound = 0.0;         // certified: inf over the ball >= bound
    bool reached_target = false;
    std::size_t cells_used = 0;
};

struct BranchBoundOptions {
    int initial_per_axis = 8;        // root subdivision per real axis
    std::size_t max_cells = 200000;  // refinement budget
    double min_halfwidth = 1e-7;     // cells below this are not split further
};

// Certified lower bound for inf of obj over the ball. Sound for any budget:
// each box contributes eval(center) - lip * circumradius, and boxes cover
// the ball. Refinement stops once the global minimum clears `target` (pass
// +inf to spend the whole budget tightening).
CertifiedInf certified_inf(const InfObjective& obj, const Ball& ball, double target,
                           const BranchBoundOptions& opts = {});

}  // namespace tkit
