#pragma once

#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "tkit/geometry.hpp"

namespace tkit {

// Smooth polynomial ramp: 1 on [0, 1/2], 0 on [1, inf), C^4 across the
// transition (flat enough near 1/2 that the unit-ball lower bound survives
// small twisting parameters).
double cutoff(double t);
double cutoff_d1(double t);  // d/dt

// Flat model over C^n with the line-bundle connection (k/4) sum
// (z dzbar - zbar dz). Distances in the rescaled metric are sqrt(k) times
// Euclidean; cover balls have g_k-radius c_radius.
struct ModelConfig {
    int n = 1;
    int k = 100;
    Ball region;                        // g_1 units
    double c_radius = 0.95;             // cover ball radius, g_k units
    double cutoff_radius_exponent = 1.0 / 6.0;

    double sqrt_k() const { return std::sqrt(static_cast<double>(k)); }
    double cutoff_radius() const {
        return std::pow(static_cast<double>(k), cutoff_radius_exponent);
    }
    double cover_spacing_gk() const {
        return (n == 1 ? 1.2 : 0.9) * c_radius;
    }
    // Cover centers in g_1 coordinates, deterministic lattice order.
    std::vector<CVec> cover_centers() const;
};

// One localized summand: an affine polynomial in the local rescaled
// coordinates u = sqrt(k) (y - center) times the normalized Gaussian frame
// at the center (cut off at cutoff_radius in g_k, infinite for the global
// frame term).
struct GaussTerm {
    CVec center;  // g_1 coordinates
    Complex a0;
    CVec alin;  // length n
    double cutoff_radius = 0.0;  // g_k; +inf = no cutoff

    double coeff_scale() const { return std::max(std::abs(a0), alin.norm()); }
};

// Asymptotic-holomorphy ledger: measured, not assumed.
struct SectionLedger {
    double sup_s = 0.0;
    double sup_grad = 0.0;   // |covariant derivative|, g_k units
    double sup_dbar = 0.0;   // |antiholomorphic part|, g_k units
    double dbar_scaled = 0.0;  // sup_dbar * sqrt(k)
};

struct DecayProfile {
    double p0 = 1.0, p1 = 0.0;  // |s| <= (p0 + p1 d) exp(-lambda d^2)
    double lambda = 0.25;
};

// A section of the twisted bundle over the region, stored in closed form as
// a sum of Gaussian-frame terms; samples and ledger are materialized on
// demand. Values are in the global trivialization; derivatives are
// covariant and measured in g_k units.
class SectionField {
  public:
    SectionField() = default;
    SectionField(const ModelConfig& cfg) : n_(cfg.n), k_(cfg.k), kappa_(cfg.cutoff_radius()) {}

    int n() const { return n_; }
    int k() const { return k_; }
    double kappa() const { return kappa_; }
    const std::vector<GaussTerm>& terms() const { return terms_; }

    void add_term(const GaussTerm& t) {
        terms_.push_back(t);
        index_dirty_ = true;
    }

    struct Jet {
        Complex value;
        CVec dz;     // covariant holomorphic derivative, g_k units
        CVec dzbar;  // covariant antiholomorphic derivative, g_k units
    };

    // Full evaluation at a g_1 point.
    Jet jet(const CVec& y) const;
    // Evaluation over a subset of terms (local views for certified work).
    Jet jet_subset(const CVec& y, const std::vector<int>& idx) const;

    double margin_at(const CVec& y) const {
        Jet J = jet(y);
        return std::max(std::abs(J.value),
                        std::max(0.0, J.dz.norm() - J.dzbar.norm()));
    }

    // Terms relevant to a g_k-ball around center (g_1); excluded terms'
    // value/C1/C2 envelopes are accumulated into far_slack.
    struct LocalView {
        std::vector<int> idx;
        double far0 = 0.0, far1 = 0.0, far2 = 0.0;
    };
    LocalView gather(const CVec& center_g1, double radius_gk) const;

    // Ledger measured on a g_k grid over the given g_1 ball.
    SectionLedger measure_ledger(const Ball& region_g1, double spacing_gk) const;

    // Envelope coefficients: |s| <= (p0 + p1 d) e^{-d^2/4} away from each
    // term, aggregated over terms (coarse decay summary).
    DecayProfile decay_profile() const;

    // Certified sup-envelopes of one term's value / first / second covariant
    // derivatives over all g_k-distances >= dmin from its center.
    static double term_env0(const GaussTerm& t, double dmin, double kappa);
    static double term_env1(const GaussTerm& t, double dmin, double kappa);
    static double term_env2(const GaussTerm& t, double dmin, double kappa, int n);

    double sqrt_k() const { return std::sqrt(static_cast<double>(k_)); }
    double dist_gk(const CVec& a, const CVec& b) const {
        return sqrt_k() * (a - b).norm();
    }

  private:
    int n_ = 1;
    int k_ = 100;
    double kappa_ = 0.0;
    std::vector<GaussTerm> terms_;
    mutable bool index_dirty_ = true;
};

// Localized near-Gaussian frame at x: exp(-|u|^2/4) with the cutoff applied
// at the configured radius, carried to the global trivialization by the
// connection phase exp(i k Im<y, xbar> / 2).
SectionField reference_section(const ModelConfig& cfg, const CVec& x);

}  // namespace tkit
