#include "tkit/prop3.hpp"

#include <algorithm>
#include <numeric>

namespace tkit {

namespace {

class ClearanceObjective : public InfObjective {
  public:
    ClearanceObjective(const PolyMap& g, const CVec& w) : g_(g), w_(w) {}
    double eval(const CVec& z) const override { return (g_(z) - w_).norm(); }
    double lip(const Ball& cell) const override {
        return derivative_bound(g_, cell, 1);
    }

  private:
    const PolyMap& g_;
    CVec w_;
};

// Certified C0 bound over the ball: grid max plus gradient slack.
double certified_c0(const PolyMap& g, const Ball& ball, const GridSpec& grid) {
    std::vector<double> vals =
        grid.map_values([&](const CVec& z) { return g(z).norm(); });
    double mx = 0.0;
    for (double v : vals) mx = std::max(mx, v);
    return mx + derivative_bound(g, ball, 1) * grid.cover_radius();
}

// C^1 size of the affine map w0 + sum w_i z_i over the ball.
double affine_c1(const CVec& w_packed, int m, int n, const Ball& ball) {
    double rho = ball.center.norm() + ball.radius;
    CMat wvec(m, n);
    for (int i = 0; i < n; ++i) wvec.col(i) = w_packed.segment(m * (i + 1), m);
    double grad = wvec.norm();
    double val = w_packed.segment(0, m).norm() + rho * grad;
    return std::max(val, grad);
}

// Margin floor along a segment whose endpoints carry margins mi, mj and
// whose map-plus-offset motion has C^1 size d_total.
double segment_lower_bound(double mi, double mj, double d_total) {
    double s = d_total > 0 ? std::clamp((mi - mj + d_total) / (2 * d_total), 0.0, 1.0)
                           : 0.5;
    return std::max(mi - s * d_total, mj - (1 - s) * d_total);
}

}  // namespace

PolyMap build_auxiliary(const PolyMap& f) {
    if (f.m() != 1) throw std::invalid_argument("build_auxiliary: needs m == 1");
    const int n = f.n();
    std::vector<PolyMap> comps;
    PolyMap g0 = f;
    std::vector<PolyMap> partials;
    for (int i = 0; i < n; ++i) {
        partials.push_back(f.d_z(i));
        g0 = g0 - partials.back().mul_z(i);
    }
    comps.push_back(g0);
    for (int i = 0; i < n; ++i) comps.push_back(partials[i]);
    return PolyMap::stack(comps);
}

double certified_clearance(const PolyMap& g, const CVec& w, const Ball& ball,
                           const GridSpec& grid) {
    ClearanceObjective obj(g, w);
    std::vector<double> vals =
        grid.map_values([&](const CVec& z) { return obj.eval(z); });
    if (vals.empty()) throw std::invalid_argument("certified_clearance: empty grid");
    double inf = vals[0];
    for (double v : vals) inf = std::min(inf, v);
    return inf - derivative_bound(g, ball, 1) * grid.cover_radius();
}

double certified_clearance_adaptive(const PolyMap& g, const CVec& w, const Ball& ball,
                                    double target, const BranchBoundOptions& opts) {
    ClearanceObjective obj(g, w);
    return certified_inf(obj, ball, target, opts).bound;
}

OffsetOutcome find_offset(const PolyMap& g, double delta, const GridSpec& grid,
                          int budget, std::uint64_t seed, double alpha_min) {
    if (!(delta > 0.0 && delta < 0.25))
        throw std::invalid_argument("find_offset: delta must lie in (0, 1/4)");
    const Ball& ball = grid.ball;
    const int mg = g.m();

    // Image of g sampled once for candidate scoring (heuristic only; the
    // certificate below is what counts).
    std::vector<CVec> image;
    grid.visit([&](const CVec& z) { image.push_back(g(z)); });
    std::size_t stride = std::max<std::size_t>(1, image.size() / 4096);
    std::vector<CVec> scored_image;
    for (std::size_t i = 0; i < image.size(); i += stride)
        scored_image.push_back(image[i]);

    std::vector<CVec> cands;
    cands.push_back(CVec::Zero(mg));
    BallSequence seq(mg, delta, seed);
    for (int i = 1; i < budget; ++i) cands.push_back(seq.next());

    std::vector<double> score(cands.size());
    parallel_chunks(cands.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& img : scored_image)
                best = std::min(best, (img - cands[c]).norm());
            score[c] = best;
        }
    });

    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return score[a] > score[b];
    });

    const double lip = derivative_bound(g, ball, 1);
    const double slack = lip * grid.cover_radius();
    OffsetOutcome out;
    out.best_alpha = -std::numeric_limits<double>::infinity();
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const CVec& w = cands[order[rank]];
        ++out.attempts;
        // Fixed-grid certificate; adaptive refinement rescues near misses.
        double inf = std::numeric_limits<double>::infinity();
        for (const auto& img : image) inf = std::min(inf, (img - w).norm());
        double alpha = inf - slack;
        if (alpha < alpha_min && inf >= alpha_min) {
            BranchBoundOptions opts;
            opts.max_cells = 40000;
            alpha = std::max(alpha,
                             certified_clearance_adaptive(g, w, ball, alpha_min * 1.05, opts));
        }
        if (alpha > out.best_alpha) {
            out.best_alpha = alpha;
            out.best_w = w;
        }
        if (alpha >= alpha_min) {
            out.ok = true;
            out.w = w;
            out.alpha = alpha;
            return out;
        }
        // Scores only decrease from here; once even the unexplored score
        // ceiling falls below the target the search cannot succeed.
        if (score[order[rank]] < alpha_min) break;
    }
    return out;
}

PerturbationResult perturb_rank_one(const PolyMap& f, double delta,
                                    const ConstantsProfile& profile,
                                    const GridSpec& grid, std::uint64_t seed,
                                    int budget) {
    if (f.m() != 1) throw std::invalid_argument("perturb_rank_one: needs m == 1");
    if (!(delta > 0.0 && delta < 0.25))
        throw std::invalid_argument("perturb_rank_one: delta must lie in (0, 1/4)");
    const Ball& ballB = grid.ball;
    const Ball ballBp = ballB.scaled(1.1);
    const GridSpec gridBp{ballBp, grid.spacing};

    // Rescaling by a uniform constant factor brings |f|_C1 within 1; the
    // whole search commutes with it, so only the margin target moves.
    CNorms cn = c_norms(f, ballBp, gridBp);
    const double fscale = std::max(1.0, cn.c1_norm());
    if (fscale > 16.0)
        throw HypothesisViolation("|f|_C1 over the enlarged ball is out of scale",
                                  cn.c1_norm(), 16.0);
    const double eta = fscale * profile.eta(delta / fscale);
    if (cn.dbar_c1_norm() > eta + 1e-12)
        throw HypothesisViolation("antiholomorphic derivative exceeds eta",
                                  cn.dbar_c1_norm(), eta);

    PolyMap g = build_auxiliary(f);
    const double aux_scale = std::max(1.0, certified_c0(g, ballBp, gridBp));
    const bool full = !f.purely_holomorphic();

    // Image samples once; candidates scored and certified best-first, each
    // passing candidate re-certified at the margin level.
    std::vector<CVec> image;
    grid.visit([&](const CVec& z) { image.push_back(g(z)); });
    const double lip_g = derivative_bound(g, ballB, 1);
    const double slack_g = lip_g * grid.cover_radius();

    std::vector<CVec> cands;
    cands.push_back(CVec::Zero(g.m()));
    BallSequence seq(g.m(), delta, seed);
    for (int i = 1; i < budget; ++i) cands.push_back(seq.next());

    std::size_t stride = std::max<std::size_t>(1, image.size() / 4096);
    std::vector<double> score(cands.size());
    parallel_chunks(cands.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < image.size(); i += stride)
                best = std::min(best, (image[i] - cands[c]).norm());
            score[c] = best;
        }
    });
    // The empty offset goes first: an already transverse map is left alone.
    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin() + 1, order.end(), [&](std::size_t a, std::size_t b) {
        return score[a] > score[b];
    });

    PerturbationResult res;
    res.delta = delta;
    res.eta = eta;
    res.aux_scale = aux_scale;
    double best_margin = -1.0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const CVec& w = cands[order[rank]];
        ++res.attempts;
        double inf = std::numeric_limits<double>::infinity();
        for (const auto& img : image) inf = std::min(inf, (img - w).norm());
        double alpha = inf - slack_g;
        if (alpha < eta && inf >= eta) {
            BranchBoundOptions opts;
            opts.max_cells = 40000;
            alpha = std::max(alpha, certified_clearance_adaptive(g, w, ballB, eta * 8, opts));
        }
        if (alpha < eta) continue;  // cannot support the margin chain

        PolyMap shifted = f.affine_shift(w);
        TransversalityCertificate cert = certify_transverse(shifted, ballB, grid, full);
        if (cert.margin < eta) {
            TransversalityCertificate fine = certify_transverse_adaptive(
                shifted, ballB, eta * 1.25, full);
            if (fine.margin > cert.margin) cert = fine;
        }
        if (cert.margin > best_margin) {
            best_margin = cert.margin;
            res.w = w;
            res.alpha = alpha;
            res.certificate = cert;
            res.achieved_margin = cert.margin;
        }
        if (cert.margin >= eta) {
            res.chain_ok = eta <= res.alpha / 8.0;
            return res;
        }
    }
    throw SearchFailure("perturb_rank_one: no offset reached the margin target",
                        best_margin, res.attempts);
}

FamilyResult perturb_rank_one_family(const std::vector<PolyMap>& family, double delta,
                                     const ConstantsProfile& profile,
                                     const GridSpec& grid, std::uint64_t seed,
                                     int budget) {
    return detail::affine_family_track(
        family, delta, profile, grid, seed, budget,
        [&](const PolyMap& f0) {
            return perturb_rank_one(f0, delta, profile, grid, seed, budget);
        });
}

namespace detail {

FamilyResult affine_family_track(
    const std::vector<PolyMap>& family, double delta, const ConstantsProfile& profile,
    const GridSpec& grid, std::uint64_t seed, int budget,
    const std::function<PerturbationResult(const PolyMap&)>& anchor_solver) {
    if (family.empty())
        throw std::invalid_argument("family must contain at least one map");
    const double eta = profile.eta(delta);
    const Ball& ballB = grid.ball;

    FamilyResult out;
    out.eta = eta;

    for (std::size_t i = 0; i + 1 < family.size(); ++i) {
        double dist = c1_distance_bound(family[i], family[i + 1], ballB.scaled(1.1));
        if (dist > eta / 4.0 + 1e-12)
            throw HypothesisViolation("consecutive family members too far apart in C1",
                                      dist, eta / 4.0);
    }

    const int m = family[0].m();
    const int n = family[0].n();
    const bool full = !family[0].purely_holomorphic();

    BranchBoundOptions track_opts;
    track_opts.max_cells = 30000;
    auto margin_of = [&](const PolyMap& f, const CVec& w) {
        PolyMap shifted = f.affine_shift(w);
        TransversalityCertificate cert =
            certify_transverse(shifted, ballB, grid, full || !shifted.purely_holomorphic());
        if (cert.margin < eta * 2.5) {
            TransversalityCertificate fine = certify_transverse_adaptive(
                shifted, ballB, eta * 2.5, full || !shifted.purely_holomorphic(),
                track_opts);
            if (fine.margin > cert.margin) cert = fine;
        }
        return cert;
    };

    PerturbationResult anchor = anchor_solver(family[0]);
    out.steps.push_back(anchor);

    for (std::size_t i = 1; i < family.size(); ++i) {
        const CVec& w_prev = out.steps.back().w;
        TransversalityCertificate keep = margin_of(family[i], w_prev);
        PerturbationResult step;
        step.delta = delta;
        step.eta = eta;
        if (keep.margin >= eta) {
            step.w = w_prev;
            step.certificate = keep;
            step.achieved_margin = keep.margin;
            step.attempts = 1;
        } else {
            // A re-anchor must restore the margin AND keep the interpolated
            // margin along the incoming segment above eta/2.
            double m_prev = out.steps.back().achieved_margin;
            double df = c1_distance_bound(family[i - 1], family[i], ballB);
            // Candidate moves at geometrically spread scales below delta/4,
            // smallest motions first.
            BallSequence seq(m * (n + 1), delta / 4.0, seed + 1000 + i);
            std::vector<CVec> moves;
            for (int c = 0; c < budget; ++c)
                moves.push_back(CVec(seq.next() * std::pow(0.5, c % 12)));
            std::stable_sort(moves.begin(), moves.end(),
                             [](const CVec& a, const CVec& b) { return a.norm() < b.norm(); });
            bool found = false;
            for (const CVec& dw : moves) {
                CVec w = w_prev + dw;
                if (w.norm() > delta) continue;
                ++step.attempts;
                TransversalityCertificate cert = margin_of(family[i], w);
                if (cert.margin < eta) continue;
                double daff = affine_c1(dw, m, n, ballB);
                if (segment_lower_bound(m_prev, cert.margin, df + daff) <
                    eta / 2.0 * 1.02)
                    continue;
                step.w = w;
                step.certificate = cert;
                step.achieved_margin = cert.margin;
                found = true;
                break;
            }
            if (!found)
                throw SearchFailure("family re-anchoring failed at t index " +
                                        std::to_string(i),
                                    keep.margin, step.attempts);
        }
        out.steps.push_back(step);
    }

    // Interpolated margins: between anchors, the margin drops by at most the
    // C^1 motion of the map plus the C^1 size of the affine change.
    out.ok = true;
    for (std::size_t i = 0; i + 1 < out.steps.size(); ++i) {
        double jump = (out.steps[i + 1].w - out.steps[i].w).norm();
        out.max_jump = std::max(out.max_jump, jump);
        double df = c1_distance_bound(family[i], family[i + 1], ballB);
        double daff = affine_c1(CVec(out.steps[i + 1].w - out.steps[i].w), m, n, ballB);
        double lb = segment_lower_bound(out.steps[i].achieved_margin,
                                        out.steps[i + 1].achieved_margin, df + daff);
        out.segment_margin_lb.push_back(lb);
        if (lb < eta / 2.0 && out.first_failing_segment < 0) {
            out.ok = false;
            out.first_failing_segment = static_cast<int>(i);
        }
    }
    return out;
}

}  // namespace detail

}  // namespace tkit
