#include "tkit/section.hpp"

#include <cmath>

#include "tkit/errors.hpp"

namespace tkit {

namespace {

// C^4 smoothstep on [0,1].
double smoothstep4(double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    double u5 = std::pow(u, 5);
    return u5 * (126.0 + u * (-420.0 + u * (540.0 + u * (-315.0 + u * 70.0))));
}

double smoothstep4_d1(double u) {
    if (u <= 0 || u >= 1) return 0.0;
    double t = u * (1.0 - u);
    return 630.0 * t * t * t * t;
}

constexpr double kChi1Max = 2.0 * 2.4609375;  // sup |d cutoff / dt|

// Sup over [dmin, inf) of (q0 + q1 t + q2 t^2 + q3 t^3) e^{-t^2/4} for
// nonnegative coefficients; the integrand is decreasing past t = 2.5.
double poly_gauss_sup(double q0, double q1, double q2, double dmin, double q3 = 0.0) {
    auto val = [&](double t) {
        return (q0 + t * (q1 + t * (q2 + t * q3))) * std::exp(-t * t / 4.0);
    };
    const double knee = 2.5;
    if (dmin >= knee) return val(dmin);
    double head = (q0 + knee * (q1 + knee * (q2 + knee * q3))) *
                  std::exp(-dmin * dmin / 4.0);
    return std::max(head, val(knee));
}

}  // namespace

double cutoff(double t) {
    if (t <= 0.5) return 1.0;
    if (t >= 1.0) return 0.0;
    return 1.0 - smoothstep4(2.0 * t - 1.0);
}

double cutoff_d1(double t) {
    if (t <= 0.5 || t >= 1.0) return 0.0;
    return -2.0 * smoothstep4_d1(2.0 * t - 1.0);
}

std::vector<CVec> ModelConfig::cover_centers() const {
    const double a_g1 = cover_spacing_gk() / sqrt_k();
    const double reach = region.radius + a_g1;
    const int side = static_cast<int>(std::ceil(reach / a_g1));
    std::vector<CVec> centers;
    std::vector<int> q(2 * n, -side);
    bool done = false;
    while (!done) {
        CVec x = region.center;
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double re = q[2 * i] * a_g1;
            double im = q[2 * i + 1] * a_g1;
            x[i] += Complex(re, im);
            r2 += re * re + im * im;
        }
        if (r2 <= reach * reach) centers.push_back(x);
        int axis = 0;
        while (axis < 2 * n && ++q[axis] > side) q[axis++] = -side;
        done = (axis == 2 * n);
    }
    return centers;
}

SectionField::Jet SectionField::jet(const CVec& y) const {
    std::vector<int> all(terms_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return jet_subset(y, all);
}

SectionField::Jet SectionField::jet_subset(const CVec& y,
                                           const std::vector<int>& idx) const {
    Jet out;
    out.value = 0.0;
    out.dz = CVec::Zero(n_);
    out.dzbar = CVec::Zero(n_);
    const double sk = sqrt_k();
    for (int ti : idx) {
        const GaussTerm& t = terms_[ti];
        CVec u = sk * (y - t.center);
        double d = u.norm();
        double chi = 1.0, dchi_dd = 0.0;
        if (std::isfinite(t.cutoff_radius)) {
            double tau = d / t.cutoff_radius;
            if (tau >= 1.0) continue;
            chi = cutoff(tau);
            dchi_dd = cutoff_d1(tau) / t.cutoff_radius;
        }
        double gauss = std::exp(-d * d / 4.0);
        if (chi * gauss < 1e-300) continue;
        // Connection phase exp(i k Im<y, xbar> / 2).
        double theta = 0.0;
        for (int i = 0; i < n_; ++i)
            theta += (y[i] * std::conj(t.center[i])).imag();
        theta *= 0.5 * k_;
        Complex G = chi * gauss * Complex(std::cos(theta), std::sin(theta));
        Complex P = t.a0;
        for (int i = 0; i < n_; ++i) P += t.alin[i] * u[i];

        out.value += P * G;
        Complex Gfull = gauss * Complex(std::cos(theta), std::sin(theta));
        for (int i = 0; i < n_; ++i) {
            Complex ub = std::conj(u[i]);
            Complex radial = d > 0 ? dchi_dd * ub / (2.0 * d) : Complex(0.0);
            out.dz[i] += (t.alin[i] * chi + P * radial - P * chi * ub / 2.0) * Gfull;
            Complex radial_bar = d > 0 ? dchi_dd * u[i] / (2.0 * d) : Complex(0.0);
            out.dzbar[i] += P * radial_bar * Gfull;
        }
    }
    return out;
}

SectionField::LocalView SectionField::gather(const CVec& center_g1,
                                             double radius_gk) const {
    LocalView view;
    const double sk = sqrt_k();
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        double d = sk * (center_g1 - terms_[i].center).norm();
        double dmin = std::max(0.0, d - radius_gk);
        double e0 = term_env0(terms_[i], dmin, kappa_);
        if (e0 > 1e-14 * std::max(1.0, terms_[i].coeff_scale())) {
            view.idx.push_back(static_cast<int>(i));
        } else {
            view.far0 += e0;
            view.far1 += term_env1(terms_[i], dmin, kappa_);
            view.far2 += term_env2(terms_[i], dmin, kappa_, n_);
        }
    }
    return view;
}

SectionLedger SectionField::measure_ledger(const Ball& region_g1,
                                           double spacing_gk) const {
    SectionLedger led;
    const double sk = sqrt_k();
    GridSpec grid{region_g1, spacing_gk / sk};
    grid.visit([&](const CVec& y) {
        Jet J = jet(y);
        led.sup_s = std::max(led.sup_s, std::abs(J.value));
        led.sup_grad = std::max(led.sup_grad, J.dz.norm() + J.dzbar.norm());
        led.sup_dbar = std::max(led.sup_dbar, J.dzbar.norm());
    });
    led.dbar_scaled = led.sup_dbar * sk;
    return led;
}

DecayProfile SectionField::decay_profile() const {
    DecayProfile prof;
    prof.p0 = 0.0;
    prof.p1 = 0.0;
    for (const auto& t : terms_) {
        prof.p0 += std::abs(t.a0);
        prof.p1 += t.alin.norm();
    }
    prof.lambda = 0.25;
    return prof;
}

double SectionField::term_env0(const GaussTerm& t, double dmin, double kappa) {
    if (std::isfinite(t.cutoff_radius) && dmin >= t.cutoff_radius) return 0.0;
    return poly_gauss_sup(std::abs(t.a0), t.alin.norm(), 0.0, dmin);
}

double SectionField::term_env1(const GaussTerm& t, double dmin, double kappa) {
    if (std::isfinite(t.cutoff_radius) && dmin >= t.cutoff_radius) return 0.0;
    double p0 = std::abs(t.a0), p1 = t.alin.norm();
    double chi1 = std::isfinite(t.cutoff_radius) ? kChi1Max / t.cutoff_radius : 0.0;
    // |grad T| <= [p1 + (p0 + p1 d)(chi1 + d/2)] e^{-d^2/4}
    return poly_gauss_sup(p1 + p0 * chi1, p0 * 0.5 + p1 * chi1, p1 * 0.5, dmin);
}

double SectionField::term_env2(const GaussTerm& t, double dmin, double kappa, int n) {
    if (std::isfinite(t.cutoff_radius) && dmin >= t.cutoff_radius) return 0.0;
    double p0 = std::abs(t.a0), p1 = t.alin.norm();
    double kap = t.cutoff_radius;
    double chi1 = std::isfinite(kap) ? kChi1Max / kap : 0.0;
    // |d^2 cutoff/dt^2| <= 38 for the C^4 ramp; radial hessian correction
    // adds chi1 / d with d >= kappa/2 on the transition support.
    double chi2 = std::isfinite(kap) ? 38.0 / (kap * kap) + chi1 * 2.0 / kap : 0.0;
    double q = chi1;  // gradient weight of the cutoff factor
    // |hess T| <= [ 2 p1 (q + d/2) + (p0 + p1 d)(chi2 + 2 q (d/2) + d^2/4 + n) ] e^{-d^2/4}
    double c0 = 2.0 * p1 * q + p0 * (chi2 + n);
    double c1 = p1 * (chi2 + n) + 2.0 * p1 * 0.5 + p0 * q;
    double c2 = p1 * q + p0 * 0.25;
    double c3 = p1 * 0.25;
    return poly_gauss_sup(c0, c1, c2, dmin, c3);
}

SectionField reference_section(const ModelConfig& cfg, const CVec& x) {
    if (!cfg.region.contains(x))
        throw std::invalid_argument("reference_section: center outside the region");
    SectionField s(cfg);
    GaussTerm t;
    t.center = x;
    t.a0 = 1.0;
    t.alin = CVec::Zero(cfg.n);
    t.cutoff_radius = cfg.cutoff_radius();
    s.add_term(t);
    return s;
}

}  // namespace tkit
