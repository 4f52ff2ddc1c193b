#pragma once

#include "tkit/geometry.hpp"
#include "tkit/polymap.hpp"

namespace tkit {

// Certified C^k data of a map over a ball: grid maxima plus Lipschitz slack,
// so every field is an upper bound for the corresponding sup over the ball.
struct CNorms {
    double c0 = 0, c1 = 0, c2 = 0;
    double dbar_c0 = 0, dbar_c1 = 0;

    double c1_norm() const { return std::max(c0, c1); }
    double dbar_c1_norm() const { return std::max(dbar_c0, dbar_c1); }
};

// Coefficient-sum bound sum |c| * d(d-1)...(d-order+1) * rho^(d-order) with
// rho = |center| + radius: an analytic upper bound for the sup of the
// order-th derivative over the ball. order in {1,2,3}.
double derivative_bound(const PolyMap& p, const Ball& ball, int order);

// Order-zero version of the same coefficient bound (sup of |p| itself).
double sup_norm_bound(const PolyMap& p, const Ball& ball);

// Certified C^1 distance bound between two maps of equal shape.
double c1_distance_bound(const PolyMap& p, const PolyMap& q, const Ball& ball);

CNorms c_norms(const PolyMap& p, const Ball& ball, const GridSpec& grid);
inline CNorms c_norms(const PolyMap& p, const Ball& ball) {
    return c_norms(p, ball, GridSpec::standard(ball));
}

// Keep the purely holomorphic part of total degree <= d; the certified
// C^1(ball) bound on the discarded remainder comes with it.
struct Truncation {
    PolyMap h;
    double err_c1 = 0;
};
Truncation truncate_to_degree(const PolyMap& p, int d, const Ball& ball);

}  // namespace tkit
