#include "tkit/bounds.hpp"

#include <cmath>

#include "tkit/linalg.hpp"

namespace tkit {

namespace {

double coeff_bound(const PolyMap& p, const Ball& ball, int order) {
    const double rho = ball.center.norm() + ball.radius;
    double total = 0.0;
    for (const auto& [idx, c] : p.coeffs()) {
        int d = idx.degree();
        if (d < order) continue;
        double falling = 1.0;
        for (int r = 0; r < order; ++r) falling *= d - r;
        total += c.norm() * falling * std::pow(rho, d - order);
    }
    return total;
}

double coeff_lip(const PolyMap& p, const Ball& ball) { return coeff_bound(p, ball, 1); }

}  // namespace

double derivative_bound(const PolyMap& p, const Ball& ball, int order) {
    if (order < 1 || order > 3)
        throw std::invalid_argument("derivative_bound: order must be 1, 2 or 3");
    return coeff_bound(p, ball, order);
}

double sup_norm_bound(const PolyMap& p, const Ball& ball) {
    return coeff_bound(p, ball, 0);
}

double c1_distance_bound(const PolyMap& p, const PolyMap& q, const Ball& ball) {
    PolyMap diff = p - q;
    if (diff.empty()) return 0.0;
    return std::max(sup_norm_bound(diff, ball), coeff_bound(diff, ball, 1));
}

CNorms c_norms(const PolyMap& p, const Ball& ball, const GridSpec& grid) {
    if (grid.spacing <= 0) throw std::invalid_argument("c_norms: empty grid");
    const int n = p.n(), m = p.m();

    // Second-derivative component maps, stacked for pointwise Frobenius
    // surrogates and for Lipschitz constants of the first-derivative fields.
    std::vector<PolyMap> zz, zzb, zbzb;
    for (int j = 0; j < m; ++j) {
        PolyMap cj = p.component(j);
        for (int i = 0; i < n; ++i) {
            PolyMap di = cj.d_z(i);
            PolyMap dbi = cj.d_zbar(i);
            for (int k = 0; k < n; ++k) {
                zz.push_back(di.d_z(k));
                zzb.push_back(dbi.d_z(k));
                zbzb.push_back(dbi.d_zbar(k));
            }
        }
    }
    PolyMap szz = PolyMap::stack(zz);
    PolyMap szzb = PolyMap::stack(zzb);
    PolyMap szbzb = PolyMap::stack(zbzb);

    struct PointVals {
        double v0, v1, v2, b0, b1;
    };
    const std::size_t total = grid.candidate_count();
    std::vector<PointVals> vals(total, PointVals{-1, 0, 0, 0, 0});
    parallel_chunks(total, [&](std::size_t lo, std::size_t hi) {
        CVec z(n);
        for (std::size_t idx = lo; idx < hi; ++idx) {
            if (!grid.decode(idx, z)) continue;
            JetSample J = p.jet(z);
            double f2 = szz(z).norm() + 2.0 * szzb(z).norm() + szbzb(z).norm();
            vals[idx] = PointVals{J.value.norm(),
                                  spectral_norm(J.dz) + spectral_norm(J.dzbar),
                                  f2,
                                  J.dzbar.norm(),
                                  szzb(z).norm() + szbzb(z).norm()};
        }
    });

    CNorms out;
    for (const auto& v : vals) {
        if (v.v0 < 0) continue;
        out.c0 = std::max(out.c0, v.v0);
        out.c1 = std::max(out.c1, v.v1);
        out.c2 = std::max(out.c2, v.v2);
        out.dbar_c0 = std::max(out.dbar_c0, v.b0);
        out.dbar_c1 = std::max(out.dbar_c1, v.b1);
    }

    const double cover = grid.cover_radius();
    PolyMap jz = p.dz_stack(), jzb = p.dzbar_stack();
    double L1 = coeff_lip(p, ball);
    double L2 = coeff_lip(jz, ball) + coeff_lip(jzb, ball);
    double L3 = coeff_lip(szz, ball) + 2.0 * coeff_lip(szzb, ball) + coeff_lip(szbzb, ball);
    double Lb1 = coeff_lip(jzb, ball);
    double Lb2 = coeff_lip(szzb, ball) + coeff_lip(szbzb, ball);
    out.c0 += L1 * cover;
    out.c1 += L2 * cover;
    out.c2 += L3 * cover;
    out.dbar_c0 += Lb1 * cover;
    out.dbar_c1 += Lb2 * cover;
    return out;
}

Truncation truncate_to_degree(const PolyMap& p, int d, const Ball& ball) {
    if (d < 0) throw std::invalid_argument("truncate_to_degree: d must be nonnegative");
    const double rho = ball.center.norm() + ball.radius;
    Truncation out;
    out.h = PolyMap(p.n(), p.m());
    for (const auto& [idx, c] : p.coeffs()) {
        if (idx.holomorphic() && idx.degree() <= d) {
            out.h.add_term(idx, c);
        } else {
            int deg = idx.degree();
            double tail0 = c.norm() * std::pow(rho, deg);
            double tail1 = deg > 0 ? c.norm() * deg * std::pow(rho, deg - 1) : 0.0;
            out.err_c1 += tail0 + tail1;
        }
    }
    out.err_c1 += out.h.normalize();
    return out;
}

}  // namespace tkit
