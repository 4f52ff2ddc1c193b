#pragma once

#include "tkit/linalg.hpp"
#include "tkit/polymap.hpp"

namespace tkit {

// Pointwise transversality margin max(|f|, sigma) of a jet, where sigma is
// the smallest singular value of the holomorphic jacobian, optionally with
// the antiholomorphic derivative norm subtracted (floored at zero). Maps
// with more outputs than inputs cannot have surjective derivative, so only
// |f| counts there.
inline double margin_at(const JetSample& jet, bool use_full_gradient) {
    double value = jet.value.norm();
    if (jet.m() > jet.n()) return value;
    double sigma = min_singular_value(jet.dz);
    if (use_full_gradient)
        sigma = std::max(0.0, sigma - spectral_norm(jet.dzbar));
    return std::max(value, sigma);
}

}  // namespace tkit
