#include "tkit/certificate.hpp"

namespace tkit {

TransversalityCertificate certify_transverse(const PolyMap& p, const Ball& ball,
                                             const GridSpec& grid,
                                             bool use_full_gradient) {
    if (p.m() > p.n())
        throw std::invalid_argument("certify_transverse: needs m <= n");
    MarginObjective obj(p, use_full_gradient);

    std::vector<double> vals = grid.map_values(
        [&](const CVec& z) { return obj.eval(z); });
    if (vals.empty()) throw std::invalid_argument("certify_transverse: empty grid");
    double inf = vals[0];
    for (double v : vals) inf = std::min(inf, v);

    double penalty = 0.0;
    if (use_full_gradient) {
        std::vector<double> pens = grid.map_values(
            [&](const CVec& z) { return spectral_norm(p.jet(z).dzbar); });
        for (double v : pens) penalty = std::max(penalty, v);
    }

    TransversalityCertificate cert;
    cert.ball = ball;
    cert.grid_spacing = grid.spacing;
    cert.lipschitz_slack = obj.lip(ball) * grid.cover_radius();
    cert.holomorphic_only = p.purely_holomorphic();
    cert.dbar_penalty = penalty;
    double margin = inf - cert.lipschitz_slack;
    cert.margin_clamped = margin < 0.0;
    cert.margin = std::max(0.0, margin);
    return cert;
}

TransversalityCertificate certify_transverse_adaptive(
    const PolyMap& p, const Ball& ball, double target, bool use_full_gradient,
    const BranchBoundOptions& opts) {
    if (p.m() > p.n())
        throw std::invalid_argument("certify_transverse: needs m <= n");
    MarginObjective obj(p, use_full_gradient);
    CertifiedInf res = certified_inf(obj, ball, target, opts);

    TransversalityCertificate cert;
    cert.ball = ball;
    cert.grid_spacing = 0.0;  // adaptive
    cert.lipschitz_slack = 0.0;
    cert.holomorphic_only = p.purely_holomorphic();
    cert.dbar_penalty = 0.0;
    cert.margin_clamped = res.bound < 0.0;
    cert.margin = std::max(0.0, res.bound);
    return cert;
}

TransversalityCertificate openness_shift(const TransversalityCertificate& cert,
                                         double eps_c1) {
    if (eps_c1 < 0) throw std::invalid_argument("openness_shift: eps must be >= 0");
    TransversalityCertificate out = cert;
    double margin = cert.margin - eps_c1;
    out.margin_clamped = cert.margin_clamped || margin < 0.0;
    out.margin = std::max(0.0, margin);
    out.holomorphic_only = false;  // valid for any nearby map
    return out;
}

}  // namespace tkit
