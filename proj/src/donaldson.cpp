#include "tkit/donaldson.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>

#include "tkit/bounds.hpp"
#include "tkit/certificate.hpp"

namespace tkit {

namespace {

// Damage envelope of a unit-size perturbation term with coefficient pattern
// (1, 1/c): value plus first-derivative sup at g_k distance >= d.
double raw_tau_envelope(double d, double c, double kappa) {
    GaussTerm t;
    t.a0 = 1.0;
    t.alin = CVec::Constant(1, Complex(1.0 / c, 0.0));
    t.cutoff_radius = kappa;
    return SectionField::term_env0(t, d, kappa) + SectionField::term_env1(t, d, kappa);
}

double tau_factor(double c, double kappa) {
    double mx = 0.0;
    for (double d = 0.0; d <= 8.0; d += 0.05)
        mx = std::max(mx, raw_tau_envelope(d, c, kappa));
    return mx;
}

// Margin of a section over a g_k ball as a branch-and-bound objective in
// g_1 coordinates.
class SectionMarginObjective : public InfObjective {
  public:
    SectionMarginObjective(const SectionField& field, const CVec& center_g1,
                           double radius_gk)
        : field_(field), view_(field.gather(center_g1, radius_gk)) {
        far_shift_ = view_.far0 + view_.far1;
    }

    double eval(const CVec& y) const override {
        SectionField::Jet J = field_.jet_subset(y, view_.idx);
        double margin = std::max(std::abs(J.value),
                                 std::max(0.0, J.dz.norm() - J.dzbar.norm()));
        return margin - far_shift_;
    }

    double lip(const Ball& cell) const override {
        const double sk = field_.sqrt_k();
        double lip_val = 0.0, lip_grad = 0.0;
        for (int ti : view_.idx) {
            const GaussTerm& t = field_.terms()[ti];
            double d = sk * (cell.center - t.center).norm();
            double dmin = std::max(0.0, d - cell.radius * sk);
            lip_val += SectionField::term_env1(t, dmin, field_.kappa());
            lip_grad += SectionField::term_env2(t, dmin, field_.kappa(), field_.n());
        }
        return sk * std::max(lip_val, lip_grad);
    }

  private:
    const SectionField& field_;
    SectionField::LocalView view_;
    double far_shift_ = 0.0;
};

// Certified C^1 fit error of a chart polynomial against f = s / s_ref over
// the chart ball, in chart units.
class FitErrorObjective : public InfObjective {
  public:
    FitErrorObjective(const SectionField& field, const SectionField::LocalView& view,
                      const SectionField& ref, const CVec& x, double chart_scale_g1,
                      double c, const PolyMap& p)
        : field_(field), view_(view), ref_(ref), x_(x), scale_(chart_scale_g1),
          c_(c), p_(p), p1_(p.dz_stack()) {}

    CVec to_global(const CVec& u_hat) const { return x_ + scale_ * u_hat; }

    // err = max(|f - p|, |d(f - p)|_chart), negated so the engine's inf
    // bound certifies the sup.
    double eval(const CVec& u_hat) const override {
        CVec y = to_global(u_hat);
        SectionField::Jet S = field_.jet_subset(y, view_.idx);
        SectionField::Jet R = ref_.jet(y);
        Complex f = S.value / R.value;
        CVec df = c_ * (S.dz - f * R.dz) / R.value;
        CVec dbf = c_ * (S.dzbar - f * R.dzbar) / R.value;
        JetSample P = p_.jet(u_hat);
        double verr = std::abs(f - P.value[0]) + view_.far0 / std::abs(R.value);
        double gerr = (df - P.dz.row(0).transpose()).norm() + dbf.norm() +
                      c_ * view_.far1 / std::abs(R.value);
        return -std::max(verr, gerr);
    }

    double lip(const Ball& cell) const override {
        const double sk = field_.sqrt_k();
        // Cell in g_k units around the reference center.
        CVec yc = to_global(cell.center);
        double rad_gk = cell.radius * scale_ * sk;
        double s0 = view_.far0, s1 = view_.far1, s2 = view_.far2;
        for (int ti : view_.idx) {
            const GaussTerm& t = field_.terms()[ti];
            double dmin =
                std::max(0.0, sk * (yc - t.center).norm() - rad_gk);
            s0 += SectionField::term_env0(t, dmin, field_.kappa());
            s1 += SectionField::term_env1(t, dmin, field_.kappa());
            s2 += SectionField::term_env2(t, dmin, field_.kappa(), field_.n());
        }
        double dref = sk * (yc - x_).norm();
        double dmax = dref + rad_gk;
        const GaussTerm& rt = ref_.terms()[0];
        double rmin = cutoff(std::min(dmax / field_.kappa(), 1.0)) *
                      std::exp(-dmax * dmax / 4.0);
        rmin = std::max(rmin, 1e-12);
        double r1 = SectionField::term_env1(rt, std::max(0.0, dref - rad_gk),
                                            field_.kappa());
        double r2 = SectionField::term_env2(rt, std::max(0.0, dref - rad_gk),
                                            field_.kappa(), field_.n());
        double f0 = s0 / rmin;
        double f1 = (s1 + f0 * r1) / rmin;
        double f2 = (s2 + 2.0 * f1 * r1 + f0 * r2) / rmin;
        double lip_val = c_ * f1 + derivative_bound(p_, cell, 1);
        double lip_grad = c_ * c_ * f2 + derivative_bound(p_, cell, 2) +
                          derivative_bound(p1_, cell, 1);
        return std::max(lip_val, lip_grad);
    }

  private:
    const SectionField& field_;
    const SectionField::LocalView& view_;
    const SectionField& ref_;
    CVec x_;
    double scale_;
    double c_;
    PolyMap p_;
    PolyMap p1_;
};

// Deterministic spread ordering of 0..count-1 by golden-ratio striding.
std::vector<int> spread_order(int count) {
    std::vector<int> order;
    int stride = std::max(1, static_cast<int>(std::round(count / 1.618)));
    while (std::gcd(stride, count) != 1) ++stride;
    int at = 0;
    for (int i = 0; i < count; ++i) {
        order.push_back(at % count);
        at += stride;
    }
    return order;
}

}  // namespace

double certified_section_margin(const SectionField& field, const CVec& center_g1,
                                double radius_gk, double target,
                                std::size_t max_cells) {
    SectionMarginObjective obj(field, center_g1, radius_gk);
    Ball ball{center_g1, radius_gk / field.sqrt_k()};
    BranchBoundOptions opts;
    opts.initial_per_axis = 6;
    opts.max_cells = max_cells;
    opts.min_halfwidth = 1e-9;
    return certified_inf(obj, ball, target, opts).bound;
}

LocalPerturbation local_perturbation(const ModelConfig& cfg, const SectionField& field,
                                     const CVec& x, double delta,
                                     const ConstantsProfile& profile,
                                     std::uint64_t seed) {
    const double sk = cfg.sqrt_k();
    const double c = cfg.c_radius;
    const double chart_scale_g1 = c / sk;  // u_hat -> y
    const double kappa = cfg.cutoff_radius();

    SectionField ref = reference_section(cfg, x);
    SectionField::LocalView view = field.gather(x, 1.15 * c);

    // Sample f = s / s_ref on the enlarged chart and fit a holomorphic
    // polynomial in the chart coordinates.
    const int n = cfg.n;
    const int dfit = n == 1 ? 12 : 6;
    std::vector<MultiIndex> basis;
    {
        std::vector<int> e(n, 0);
        bool done = false;
        while (!done) {
            int total = std::accumulate(e.begin(), e.end(), 0);
            if (total <= dfit) {
                MultiIndex idx(n);
                for (int i = 0; i < n; ++i) idx.zexp(i) = e[i];
                basis.push_back(idx);
            }
            int axis = 0;
            while (axis < n && ++e[axis] > dfit) e[axis++] = 0;
            done = (axis == n);
        }
    }

    GridSpec sample_grid{Ball::unit(n).scaled(1.1), n == 1 ? 1.1 / 12.0 : 1.1 / 4.0};
    std::vector<CVec> pts = sample_grid.points();
    CMat A(pts.size(), basis.size());
    CVec b(pts.size());
    for (std::size_t r = 0; r < pts.size(); ++r) {
        CVec y = x + chart_scale_g1 * pts[r];
        SectionField::Jet S = field.jet_subset(y, view.idx);
        SectionField::Jet R = ref.jet(y);
        b[r] = S.value / R.value;
        for (std::size_t cidx = 0; cidx < basis.size(); ++cidx) {
            Complex mono = 1.0;
            for (int i = 0; i < n; ++i)
                for (int e = 0; e < basis[cidx].zexp(i); ++e) mono *= pts[r][i];
            A(r, cidx) = mono;
        }
    }
    CVec coef = A.colPivHouseholderQr().solve(b);
    PolyMap p(n, 1);
    for (std::size_t cidx = 0; cidx < basis.size(); ++cidx)
        p.add_term(basis[cidx], coef[cidx]);
    p.normalize();

    // Certified fit error over the enlarged chart.
    FitErrorObjective err_obj(field, view, ref, x, chart_scale_g1, c, p);
    BranchBoundOptions err_opts;
    err_opts.initial_per_axis = 6;
    err_opts.max_cells = 30000;
    double e_fit =
        -certified_inf(err_obj, Ball::unit(n).scaled(1.1), -1e-9, err_opts).bound;
    e_fit = std::max(0.0, e_fit);

    // Chart normalization and the search radius that keeps |tau|_C1 <= delta.
    GridSpec chart_grid{Ball::unit(n), n == 1 ? 1.0 / 32.0 : 1.0 / 10.0};
    GridSpec chart_grid_plus{Ball::unit(n).scaled(1.1), chart_grid.spacing};
    CNorms pn = c_norms(p, chart_grid_plus.ball, chart_grid_plus);
    double sc = std::max(1.0, pn.c1_norm() * 1.001);
    double tf = tau_factor(c, kappa);
    double delta_search = std::min(0.24, delta / (sc * tf));
    if (delta_search <= 0)
        throw HypothesisViolation("local_perturbation: no search budget", delta, 0.0);

    double eta_local = profile.eta(delta_search);
    if (e_fit > eta_local / 2.0)
        throw HypothesisViolation(
            "local_perturbation: chart fit error exceeds the margin budget "
            "(twisting parameter too small for this field)",
            e_fit, eta_local / 2.0);

    LocalPerturbation out;
    out.fit_err = e_fit;
    out.rescale = sc;
    out.inner =
        perturb_rank_one(p.scaled(1.0 / sc), delta_search, profile, chart_grid, seed);
    out.perturbed = true;

    GaussTerm tau;
    tau.center = x;
    tau.a0 = -sc * out.inner.w[0];
    tau.alin = CVec(-sc / c * out.inner.w.segment(1, n));
    tau.cutoff_radius = kappa;
    out.tau = tau;
    out.tau_c1 = SectionField::term_env0(tau, 0.0, kappa) +
                 SectionField::term_env1(tau, 0.0, kappa);

    // Certified margin of s + tau on the cover ball.
    SectionField with_tau = field;
    with_tau.add_term(tau);
    out.section_margin = certified_section_margin(
        with_tau, x, c, std::numeric_limits<double>::infinity(), 20000);
    return out;
}

std::pair<SectionField, GlobalReport> global_iteration(const ModelConfig& cfg,
                                                       const SectionField& s0,
                                                       double delta0,
                                                       const ConstantsProfile& profile,
                                                       std::uint64_t seed) {
    if (!(delta0 > 0 && delta0 < 0.25))
        throw std::invalid_argument("global_iteration: delta0 must lie in (0, 1/4)");
    const double sk = cfg.sqrt_k();
    const double c = cfg.c_radius;
    const double kappa = cfg.cutoff_radius();
    const double a_gk = cfg.cover_spacing_gk();

    SectionField field = s0;
    GlobalReport rep;
    rep.eta_goal = profile.eta(delta0) / 4.0;
    const double eta_floor = rep.eta_goal;
    const double theta_skip = 8.0 * eta_floor;

    std::vector<CVec> centers = cfg.cover_centers();
    const double tf = tau_factor(c, kappa);
    auto damage_norm = [&](double dist_gk) {
        return raw_tau_envelope(std::max(0.0, dist_gk - c), c, kappa) / tf;
    };

    // Separation classes: same-class centers at least P*a apart, with P the
    // smallest stride whose ring interference stays under 1/10.
    int P = 2;
    for (; P < 32; ++P) {
        double sum = 0.0;
        int reach = static_cast<int>(std::ceil(10.0 / P)) + 2;
        for (int i = -reach; i <= reach; ++i)
            for (int j = -reach; j <= reach; ++j) {
                if (i == 0 && j == 0) continue;
                double d = std::hypot(i, j) * P * a_gk;
                sum += damage_norm(d) * (cfg.n == 2 ? 4.0 : 1.0);
            }
        if (sum <= 0.1) break;
    }
    rep.separation_classes_per_axis = P;
    const int colors = static_cast<int>(std::pow(P, 2 * cfg.n));
    rep.color_steps = colors;

    auto color_of = [&](const CVec& center) {
        int code = 0, base = 1;
        for (int i = 0; i < cfg.n; ++i) {
            double re = (center[i] - cfg.region.center[i]).real();
            double im = (center[i] - cfg.region.center[i]).imag();
            long qr = std::lround(re * sk / a_gk);
            long qi = std::lround(im * sk / a_gk);
            code += base * static_cast<int>(((qr % P) + P) % P);
            base *= P;
            code += base * static_cast<int>(((qi % P) + P) % P);
            base *= P;
        }
        return code;
    };

    struct Tracked {
        int ball_index;
        double margin;
        double budget;  // margin - eta_floor
    };
    std::vector<Tracked> processed;
    rep.balls.resize(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        rep.balls[i].center = centers[i];
        rep.balls[i].color = color_of(centers[i]);
    }

    double step_delta_cap = delta0;
    std::vector<int> order = spread_order(colors);
    bool any_failed = false;
    for (int oc = 0; oc < colors; ++oc) {
        const int color = order[oc];
        StepRecord step;
        step.color = color;
        step.delta_j = 0.0;
        step.worst_margin = std::numeric_limits<double>::infinity();

        for (std::size_t bi = 0; bi < centers.size(); ++bi) {
            if (rep.balls[bi].color != color) continue;
            const CVec& x = centers[bi];

            double current =
                certified_section_margin(field, x, c, theta_skip * 1.1, 20000);
            if (current >= theta_skip) {
                ++step.skipped;
                processed.push_back(Tracked{static_cast<int>(bi), current,
                                            current - eta_floor});
                rep.balls[bi].margin_bookkeeping = current;
                continue;
            }

            // Budget cap: no processed ball may be pushed below eta_floor.
            double cap = step_delta_cap;
            for (const auto& tr : processed) {
                double dist = sk * (x - centers[tr.ball_index]).norm();
                double e = damage_norm(dist);
                if (e > 1e-14) cap = std::min(cap, tr.budget / (2.0 * e));
            }
            if (cap < 1e-6 * delta0) {
                rep.balls[bi].failed = true;
                any_failed = true;
                continue;
            }

            LocalPerturbation lp;
            try {
                lp = local_perturbation(cfg, field, x, cap, profile,
                                        seed + 7919 * bi);
            } catch (const std::exception&) {
                rep.balls[bi].failed = true;
                any_failed = true;
                continue;
            }
            field.add_term(lp.tau);
            ++step.active;
            step.delta_j = std::max(step.delta_j, cap);
            step.worst_margin = std::min(step.worst_margin, lp.section_margin);
            rep.balls[bi].perturbed = true;
            rep.balls[bi].delta_used = cap;
            rep.balls[bi].margin_bookkeeping = lp.section_margin;

            // Charge the damage against every processed ball.
            double tau_scale = std::max(std::abs(lp.tau.a0), lp.tau.alin.norm() * c);
            for (auto& tr : processed) {
                double dist = sk * (x - centers[tr.ball_index]).norm();
                double dmg = raw_tau_envelope(std::max(0.0, dist - c), c, kappa) *
                             tau_scale;
                tr.margin -= dmg;
                tr.budget -= dmg;
                rep.balls[tr.ball_index].margin_bookkeeping = tr.margin;
                step.interference = std::max(step.interference, dmg);
            }
            processed.push_back(Tracked{static_cast<int>(bi), lp.section_margin,
                                        lp.section_margin - eta_floor});
        }
        if (step.active == 0) step.worst_margin = 0.0;
        if (step.active > 0)
            step_delta_cap = std::min(step_delta_cap, std::max(step.delta_j, 1e-6));
        rep.steps.push_back(step);
    }

    // Bookkeeping floor and independent recertification.
    rep.eta_star_bookkeeping = std::numeric_limits<double>::infinity();
    for (const auto& tr : processed)
        rep.eta_star_bookkeeping = std::min(rep.eta_star_bookkeeping, tr.margin);

    rep.eta_star_recertified = std::numeric_limits<double>::infinity();
    std::vector<double> recert(centers.size(), 0.0);
    parallel_chunks(centers.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t bi = lo; bi < hi; ++bi)
            recert[bi] = certified_section_margin(
                field, centers[bi], c, rep.eta_star_bookkeeping * 4.0, 40000);
    });
    for (std::size_t bi = 0; bi < centers.size(); ++bi) {
        rep.balls[bi].margin_recertified = recert[bi];
        rep.eta_star_recertified = std::min(rep.eta_star_recertified, recert[bi]);
    }

    rep.ok = !any_failed && rep.eta_star_recertified > 0.0;
    if (any_failed) rep.failure = "some cover balls exhausted their budget";
    return {std::move(field), std::move(rep)};
}

namespace {

double winding_sum(const SectionField& s, const std::function<CVec(double)>& path,
                   int min_samples) {
    int samples = min_samples;
    for (int attempt = 0; attempt < 8; ++attempt) {
        double total = 0.0;
        bool refine = false;
        Complex prev = s.jet(path(0.0)).value;
        if (std::abs(prev) < 1e-13) return std::numeric_limits<double>::quiet_NaN();
        for (int i = 1; i <= samples; ++i) {
            Complex cur = s.jet(path(static_cast<double>(i) / samples)).value;
            if (std::abs(cur) < 1e-13) return std::numeric_limits<double>::quiet_NaN();
            double darg = std::arg(cur / prev);
            if (std::abs(darg) > 1.5) {
                refine = true;
                break;
            }
            total += darg;
            prev = cur;
        }
        if (!refine) return total / (2.0 * M_PI);
        samples *= 2;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

int boundary_winding(const ModelConfig& cfg, const SectionField& s, double radius_g1) {
    if (cfg.n != 1)
        throw std::invalid_argument("boundary_winding: only n == 1");
    double r = radius_g1;
    for (int nudge = 0; nudge < 6; ++nudge) {
        auto path = [&](double t) {
            CVec y(1);
            y[0] = cfg.region.center[0] +
                   r * Complex(std::cos(2 * M_PI * t), std::sin(2 * M_PI * t));
            return y;
        };
        double w = winding_sum(s, path, 512);
        if (!std::isnan(w)) return static_cast<int>(std::lround(w));
        r += 0.2 / cfg.sqrt_k();
    }
    throw std::runtime_error("boundary_winding: section vanishes on every tried contour");
}

std::vector<ZeroLocus> extract_zero_set(const ModelConfig& cfg, const SectionField& s,
                                        double certified_margin) {
    if (certified_margin <= 0.0)
        throw std::invalid_argument("extract_zero_set: needs a transverse section");
    std::vector<ZeroLocus> out;
    const double sk = cfg.sqrt_k();

    auto polish = [&](CVec y) -> std::optional<CVec> {
        for (int it = 0; it < 40; ++it) {
            SectionField::Jet J = s.jet(y);
            if (std::abs(J.value) < 1e-12) return y;
            // Solve ds * dy + dbars * conj(dy) = -value (real 2x2, g_1 units).
            Complex a = J.dz[0] * sk, b = J.dzbar[0] * sk;
            Eigen::Matrix2d M;
            M << (a + b).real(), (-a + b).imag(), (a + b).imag(), (a - b).real();
            Eigen::Vector2d rhs(-J.value.real(), -J.value.imag());
            if (std::abs(M.determinant()) < 1e-18) return std::nullopt;
            Eigen::Vector2d step = M.colPivHouseholderQr().solve(rhs);
            y[0] += Complex(step[0], step[1]);
        }
        return std::nullopt;
    };

    if (cfg.n == 1) {
        const double cell_gk = 0.45;
        const double cell = cell_gk / sk;
        const double R = cfg.region.radius;
        const int side = static_cast<int>(std::ceil(R / cell));
        for (int qi = -side; qi <= side; ++qi) {
            for (int qj = -side; qj <= side; ++qj) {
                CVec yc(1);
                yc[0] = cfg.region.center[0] + Complex(qi * cell, qj * cell);
                if ((yc - cfg.region.center).norm() > R) continue;
                SectionField::Jet J = s.jet(yc);
                // A zero inside the cell forces |s| at the center below the
                // local slope times the cell radius.
                double slope = (J.dz.norm() + J.dzbar.norm()) * 1.6 + 1.0;
                if (std::abs(J.value) > slope * cell_gk) continue;
                auto path = [&](double t) {
                    CVec y(1);
                    double ang = 2 * M_PI * t;
                    y[0] = yc[0] + 0.75 * cell *
                                       Complex(std::cos(ang), std::sin(ang)) *
                                       std::sqrt(2.0);
                    return y;
                };
                double w = winding_sum(s, path, 64);
                if (std::isnan(w) || std::lround(w) == 0) continue;
                auto z = polish(yc);
                if (!z) continue;
                bool dup = false;
                for (const auto& known : out)
                    if (sk * (known.position - *z).norm() < 0.2) dup = true;
                if (dup) continue;
                SectionField::Jet Jz = s.jet(*z);
                ZeroLocus loc;
                loc.position = *z;
                loc.abs_ds = Jz.dz.norm();
                loc.abs_dbar = Jz.dzbar.norm();
                loc.ratio = loc.abs_dbar / std::max(loc.abs_ds, 1e-300);
                loc.symplectic = loc.ratio < 0.5;
                loc.chain = -1;
                out.push_back(loc);
            }
        }
        return out;
    }

    // n == 2: zeros traced slice by slice in the second coordinate.
    const double R = cfg.region.radius;
    const int slices = 33;
    int chain_id = 0;
    std::vector<std::pair<CVec, int>> prev_slice;
    for (int si = 0; si < slices; ++si) {
        double x2 = -R + 2.0 * R * si / (slices - 1);
        std::vector<std::pair<CVec, int>> cur_slice;
        double slice_r2 = R * R - x2 * x2;
        if (slice_r2 <= 0) continue;
        double r1 = std::sqrt(slice_r2);
        const double cell = 0.45 / sk;
        const int side = static_cast<int>(std::ceil(r1 / cell));
        for (int qi = -side; qi <= side; ++qi)
            for (int qj = -side; qj <= side; ++qj) {
                CVec yc(2);
                yc[0] = cfg.region.center[0] + Complex(qi * cell, qj * cell);
                yc[1] = cfg.region.center[1] + Complex(x2, 0.0);
                if ((yc - cfg.region.center).norm() > R) continue;
                SectionField::Jet J = s.jet(yc);
                double slope = (J.dz.norm() + J.dzbar.norm()) * 1.6 + 1.0;
                if (std::abs(J.value) > slope * 0.45) continue;
                // Newton in the first coordinate only.
                CVec y = yc;
                bool found = false;
                for (int it = 0; it < 40; ++it) {
                    SectionField::Jet Jy = s.jet(y);
                    if (std::abs(Jy.value) < 1e-10) {
                        found = true;
                        break;
                    }
                    Complex a = Jy.dz[0] * sk, b = Jy.dzbar[0] * sk;
                    Eigen::Matrix2d M;
                    M << (a + b).real(), (-a + b).imag(), (a + b).imag(),
                        (a - b).real();
                    Eigen::Vector2d rhs(-Jy.value.real(), -Jy.value.imag());
                    if (std::abs(M.determinant()) < 1e-18) break;
                    Eigen::Vector2d st = M.colPivHouseholderQr().solve(rhs);
                    y[0] += Complex(st[0], st[1]);
                }
                if (!found) continue;
                bool dup = false;
                for (const auto& known : cur_slice)
                    if (sk * (known.first - y).norm() < 0.2) dup = true;
                if (dup) continue;
                int chain = -1;
                for (const auto& prev : prev_slice)
                    if (sk * (prev.first - y).norm() < 3.0) chain = prev.second;
                if (chain < 0) chain = chain_id++;
                cur_slice.push_back({y, chain});
                SectionField::Jet Jz = s.jet(y);
                ZeroLocus loc;
                loc.position = y;
                loc.abs_ds = Jz.dz.norm();
                loc.abs_dbar = Jz.dzbar.norm();
                loc.ratio = loc.abs_dbar / std::max(loc.abs_ds, 1e-300);
                loc.symplectic = loc.ratio < 0.5;
                loc.chain = chain;
                out.push_back(loc);
            }
        prev_slice = cur_slice;
    }
    return out;
}

}  // namespace tkit
