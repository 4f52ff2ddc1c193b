#include "tkit/prop4.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <numeric>

namespace tkit {

namespace {

using BigInt = boost::multiprecision::cpp_int;

BigInt binomial(std::int64_t top, std::int64_t k) {
    if (k < 0 || k > top) return 0;
    BigInt r = 1;
    for (std::int64_t i = 0; i < k; ++i) {
        r *= top - i;
        r /= i + 1;
    }
    return r;
}

CVec uniform_in_ball(std::mt19937_64& rng, const Ball& ball) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const int n = ball.n();
    while (true) {
        CVec z(n);
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double a = uni(rng), b = uni(rng);
            z[i] = Complex(a, b);
            r2 += a * a + b * b;
        }
        if (r2 <= 1.0) return ball.center + ball.radius * z;
    }
}

Complex uniform_in_disk(std::mt19937_64& rng, double radius) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    while (true) {
        double a = uni(rng), b = uni(rng);
        if (a * a + b * b <= 1.0) return Complex(a * radius, b * radius);
    }
}

}  // namespace

std::int64_t degree_bound(int N, int d) {
    if (N < 2) throw std::invalid_argument("degree_bound: N must be >= 2");
    if (d < 2) throw std::invalid_argument("degree_bound: d must be >= 2");
    std::int64_t D = N;
    for (int i = 0; i < N - 1; ++i) {
        if (D > (std::numeric_limits<std::int64_t>::max)() / d)
            throw std::overflow_error("degree_bound overflow");
        D *= d;
    }
    return D;
}

bool dimension_count_check(int N, int d, std::int64_t D) {
    if (N <= 0 || d <= 0 || D <= 0)
        throw std::invalid_argument("dimension_count_check: positive inputs required");
    BigInt dimE = binomial(D + N, N);
    BigInt dimEp = binomial(static_cast<std::int64_t>(d) * D + N - 1, N - 1);
    return dimE > dimEp;
}

CVec BadSetParam::eval(const CVec& z, const CMat& theta, const CVec& lambda) const {
    const int mm = m(), nn = n();
    JetSample J = h.jet(z);
    CMat g(mm, nn);  // g(j,i) = w_i^j for i >= 1
    for (int i = 0; i < nn; ++i) {
        for (int j = 0; j < mm - 1; ++j) g(j, i) = J.dz(j, i) + theta(j, i);
        Complex lam_mix = 0.0;
        for (int j = 0; j < mm - 1; ++j) lam_mix += lambda[j] * theta(j, i);
        g(mm - 1, i) = J.dz(mm - 1, i) + lam_mix;
    }
    CVec w = CVec::Zero(N);
    CVec w0 = J.value;
    for (int i = 0; i < nn; ++i) w0 -= g.col(i) * z[i];
    w.segment(0, mm) = w0;
    for (int i = 0; i < nn; ++i) w.segment(mm * (i + 1), mm) = g.col(i);
    return w;
}

std::pair<double, double> BadSetParam::residuals(const CVec& z, const CVec& w) const {
    const int mm = m(), nn = n();
    JetSample J = h.jet(z);
    CVec val = J.value - w.segment(0, mm);
    CMat shifted = J.dz;
    for (int i = 0; i < nn; ++i) {
        val -= w.segment(mm * (i + 1), mm) * z[i];
        shifted.col(i) -= w.segment(mm * (i + 1), mm);
    }
    return {val.norm(), min_singular_value(shifted)};
}

BadSetParam::Sample BadSetParam::sample(std::mt19937_64& rng, double delta,
                                        bool bias_into_ball) const {
    const int mm = m(), nn = n();
    Sample s;
    s.z = uniform_in_ball(rng, zball);
    s.theta = CMat::Zero(std::max(0, mm - 1), nn);
    s.lambda = CVec::Zero(std::max(0, mm - 1));
    if (mm > 1) {
        JetSample J = h.jet(s.z);
        for (int j = 0; j < mm - 1; ++j)
            for (int i = 0; i < nn; ++i) {
                Complex t = bias_into_ball
                                ? -J.dz(j, i) + uniform_in_disk(rng, delta)
                                : uniform_in_disk(rng, theta_bound);
                if (std::abs(t) > theta_bound)
                    t *= theta_bound / std::abs(t);
                s.theta(j, i) = t;
            }
        if (bias_into_ball) {
            // Least-squares lambda steering the last row toward the ball.
            CMat A(nn, mm - 1);
            CVec b(nn);
            for (int i = 0; i < nn; ++i) {
                for (int j = 0; j < mm - 1; ++j) A(i, j) = s.theta(j, i);
                b[i] = -J.dz(mm - 1, i) + uniform_in_disk(rng, delta);
            }
            CVec lam = A.colPivHouseholderQr().solve(b);
            for (int j = 0; j < mm - 1; ++j) {
                Complex l = lam[j];
                if (std::abs(l) > lambda_bound) l *= lambda_bound / std::abs(l);
                s.lambda[j] = l;
            }
        } else {
            for (int j = 0; j < mm - 1; ++j)
                s.lambda[j] = uniform_in_disk(rng, lambda_bound);
        }
    }
    s.w = eval(s.z, s.theta, s.lambda);
    return s;
}

BadSetParam build_bad_set(const PolyMap& h, double delta) {
    if (!h.purely_holomorphic())
        throw std::invalid_argument("build_bad_set: h must be purely holomorphic");
    if (h.m() > h.n()) throw std::invalid_argument("build_bad_set: needs m <= n");
    BadSetParam out;
    out.h = h;
    out.N = h.m() * (h.n() + 1);
    out.zball = Ball::unit(h.n());
    double dh_sup = derivative_bound(h, out.zball, 1);
    out.theta_bound = delta + dh_sup;
    out.lambda_bound =
        h.m() > 1 ? (delta + dh_sup) / std::max(1e-6, out.theta_bound) * 4.0 : 0.0;
    return out;
}

CoveringBudget covering_budget(int N, int d, double delta, double eta, double C,
                               double c_approx) {
    if (!(eta > 0 && eta < delta && delta < 0.25))
        throw std::invalid_argument("covering_budget: need 0 < eta < delta < 1/4");
    CoveringBudget out;
    out.N = N;
    out.d = d;
    out.D = degree_bound(N, d);
    out.delta = delta;
    out.eta = eta;
    out.C = C;
    out.c_approx = c_approx;
    const double e2 = 2.0 * N - 2.0;
    out.M = C * static_cast<double>(out.D) * std::pow(delta, e2) * std::pow(eta, -e2);
    out.Z_volume_fraction =
        out.M * std::pow((3.0 * c_approx + 5.0) * eta / delta, 2.0 * N);
    out.feasible = out.Z_volume_fraction < 1.0;
    return out;
}

bool lemma3_certify(const PolyMap& h, const CVec& w, double alpha,
                    const GridSpec& grid) {
    if (!h.purely_holomorphic())
        throw std::invalid_argument("lemma3_certify: h must be purely holomorphic");
    PolyMap shifted = h.affine_shift(w);
    TransversalityCertificate cert =
        certify_transverse(shifted, grid.ball, grid, false);
    if (cert.margin >= alpha) return true;
    TransversalityCertificate fine =
        certify_transverse_adaptive(shifted, grid.ball, alpha, false);
    return fine.margin >= alpha;
}

CVec lemma3_witness(const PolyMap& h, const CVec& z, const CVec& v, const CVec& w) {
    const int m = h.m(), n = h.n();
    if (std::abs(v.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("lemma3_witness: v must be a unit vector");
    PolyMap shifted = h.affine_shift(w);
    JetSample J = shifted.jet(z);
    CVec u = CVec::Zero(m * (n + 1));
    CVec u0 = J.value;
    for (int i = 0; i < n; ++i) {
        Complex ci = (v.adjoint() * J.dz.col(i))(0, 0);
        CVec ui = ci * v;
        u.segment(m * (i + 1), m) = ui;
        u0 -= z[i] * ui;
    }
    u.segment(0, m) = u0;
    return u;
}

CVec min_singular_direction(const PolyMap& h, const CVec& z, const CVec& w) {
    PolyMap shifted = h.affine_shift(w);
    JetSample J = shifted.jet(z);
    Eigen::JacobiSVD<CMat> svd(J.dz, Eigen::ComputeFullU);
    return svd.matrixU().col(J.m() - 1);
}

PerturbationResult perturb_rank_m(const PolyMap& f, double delta,
                                  const ConstantsProfile& profile,
                                  const GridSpec& grid, std::uint64_t seed,
                                  int budget) {
    if (f.m() > f.n()) throw std::invalid_argument("perturb_rank_m: needs m <= n");
    if (!(delta > 0.0 && delta < 0.25))
        throw std::invalid_argument("perturb_rank_m: delta must lie in (0, 1/4)");
    const Ball& ballB = grid.ball;
    const Ball ballBp = ballB.scaled(1.1);
    const GridSpec gridBp{ballBp, grid.spacing};
    const int m = f.m(), n = f.n();
    const int N = m * (n + 1);

    // Same uniform rescaling as the rank-one solver, against the C0 bound.
    CNorms cn = c_norms(f, ballBp, gridBp);
    const double fscale = std::max(1.0, cn.c0);
    if (fscale > 16.0)
        throw HypothesisViolation("|f|_C0 over the enlarged ball is out of scale",
                                  cn.c0, 16.0);
    const double eta = fscale * profile.eta(delta / fscale);
    if (cn.dbar_c1_norm() > eta + 1e-12)
        throw HypothesisViolation("antiholomorphic derivative exceeds eta",
                                  cn.dbar_c1_norm(), eta);

    const int d_trunc = std::max(
        2, static_cast<int>(std::ceil(std::log(fscale / eta))));
    Truncation tr = truncate_to_degree(f, d_trunc, ballB);
    const PolyMap& h = tr.h;
    const bool exact = tr.err_c1 == 0.0;
    const bool full = !f.purely_holomorphic();

    BadSetParam bad = build_bad_set(h, delta);

    // Bad-set point cloud for candidate scoring.
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<CVec> cloud;
    const int cloud_size = 4096;
    cloud.reserve(cloud_size);
    for (int i = 0; i < cloud_size; ++i) {
        auto s = bad.sample(rng, delta, /*bias_into_ball=*/true);
        if (s.w.norm() <= 4.0) cloud.push_back(s.w);
    }

    std::vector<CVec> cands;
    cands.push_back(CVec::Zero(N));
    BallSequence seq(N, delta, seed);
    for (int i = 1; i < budget; ++i) cands.push_back(seq.next());

    std::vector<double> score(cands.size());
    parallel_chunks(cands.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& s : cloud) best = std::min(best, (s - cands[c]).norm());
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
    res.aux_scale = tr.err_c1;  // approximation error carried for openness
    BranchBoundOptions loop_opts;
    loop_opts.initial_per_axis = n == 1 ? 8 : 5;
    loop_opts.max_cells = 60000;
    double best_margin = -1.0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const CVec& w = cands[order[rank]];
        ++res.attempts;

        // Candidates are screened adaptively; the survivor gets the grid
        // certificate as well.
        PolyMap shifted_h = h.affine_shift(w);
        TransversalityCertificate cert_h = certify_transverse_adaptive(
            shifted_h, ballB, (eta + tr.err_c1) * 1.5, false, loop_opts);
        TransversalityCertificate cert_best = openness_shift(cert_h, tr.err_c1);
        if (!exact && cert_best.margin < eta) {
            PolyMap shifted_f = f.affine_shift(w);
            TransversalityCertificate direct = certify_transverse_adaptive(
                shifted_f, ballB, eta * 1.5, full, loop_opts);
            if (direct.margin > cert_best.margin) cert_best = direct;
        }

        if (cert_best.margin > best_margin) {
            best_margin = cert_best.margin;
            res.w = w;
            res.alpha = score[order[rank]];  // sampled distance to the bad set
            res.certificate = cert_best;
            res.achieved_margin = cert_best.margin;
        }
        if (cert_best.margin >= eta) {
            PolyMap shifted_f = f.affine_shift(w);
            TransversalityCertificate direct =
                certify_transverse(shifted_f, ballB, grid, full);
            if (direct.margin > cert_best.margin) {
                res.certificate = direct;
                res.achieved_margin = direct.margin;
            }
            res.chain_ok = res.alpha > 3.0 * (profile.c_approx + 1.0) * eta;
            return res;
        }
        if (score[order[rank]] <= 0.0) break;
    }
    throw SearchFailure("perturb_rank_m: no offset reached the margin target",
                        best_margin, res.attempts);
}

FamilyResult perturb_rank_m_family(const std::vector<PolyMap>& family, double delta,
                                   const ConstantsProfile& profile,
                                   const GridSpec& grid, std::uint64_t seed,
                                   int budget) {
    return detail::affine_family_track(
        family, delta, profile, grid, seed, budget, [&](const PolyMap& f0) {
            return perturb_rank_m(f0, delta, profile, grid, seed, budget);
        });
}

}  // namespace tkit
