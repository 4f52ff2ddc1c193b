// Batch front-end: deterministic, file-driven runs of the certification and
// perturbation solvers. Exit codes: 0 ok, 1 input/schema, 2 hypothesis
// violation, 3 search failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <random>

#include "tkit/donaldson.hpp"
#include "tkit/json_io.hpp"
#include "tkit/report.hpp"

namespace fs = std::filesystem;
using namespace tkit;

namespace {

std::string sibling_with_ext(const std::string& out, const char* ext) {
    fs::path p(out);
    p.replace_extension(ext);
    return p.string();
}

// Sphere-sampling estimate of the smallest singular value: global draws
// followed by shrinking local refinement, all inside the sample budget.
double sampled_min_direction(const CMat& L, int samples, std::uint64_t seed) {
    const int m = static_cast<int>(L.rows());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_unit = [&]() {
        CVec v(m);
        for (int i = 0; i < m; ++i) v[i] = Complex(gauss(rng), gauss(rng));
        return CVec(v / v.norm());
    };
    auto score = [&](const CVec& v) { return (v.adjoint() * L).norm(); };

    int global = samples / 5;
    CVec best = random_unit();
    double best_val = score(best);
    for (int i = 1; i < global; ++i) {
        CVec v = random_unit();
        double s = score(v);
        if (s < best_val) {
            best_val = s;
            best = v;
        }
    }
    double radius = 0.5;
    int rounds = 60;
    int per_round = std::max(1, (samples - global) / rounds);
    for (int r = 0; r < rounds; ++r) {
        for (int i = 0; i < per_round; ++i) {
            CVec v = best;
            for (int k = 0; k < m; ++k)
                v[k] += radius * Complex(gauss(rng), gauss(rng));
            v /= v.norm();
            double s = score(v);
            if (s < best_val) {
                best_val = s;
                best = v;
            }
        }
        radius *= 0.75;
    }
    return best_val;
}

int run_certify(const std::string& input, const std::string& out, double spacing,
                double region, bool plot) {
    PolyMap p = polymap_from_json(load_json(input));
    Ball ball = Ball::unit(p.n()).scaled(region);
    GridSpec grid{ball, spacing > 0 ? spacing : ball.radius / 64.0};
    TransversalityCertificate cert = certify_transverse(p, ball, grid);
    save_json(to_json(cert), out);
    write_margin_csv(p, grid, !p.purely_holomorphic(), sibling_with_ext(out, ".csv"));
    if (plot && p.n() == 1) {
        ValueGrid vg = sample_polymap_margin(p, grid, !p.purely_holomorphic());
        write_svg_heatmap(vg, {}, sibling_with_ext(out, ".svg"));
    }
    std::cout << "margin " << cert.margin << "\n";
    return 0;
}

int run_perturb(bool rank_m, const std::string& input, const std::string& out,
                double delta, double eta_override, double spacing,
                std::uint64_t seed, int budget, const std::string& budget_report,
                bool plot) {
    PolyMap f = polymap_from_json(load_json(input));
    Ball ball = Ball::unit(f.n());
    GridSpec grid{ball, spacing > 0 ? spacing
                                    : (f.n() == 1 ? 1.0 / 64.0 : 1.0 / 16.0)};
    ConstantsProfile profile;
    if (eta_override > 0) {
        // Solve safety so that profile.eta(delta) == eta_override.
        profile.safety = delta *
                         std::pow(std::log(1.0 / delta), -profile.p_exponent) /
                         eta_override;
    }
    PerturbationResult res = rank_m
                                 ? perturb_rank_m(f, delta, profile, grid, seed, budget)
                                 : perturb_rank_one(f, delta, profile, grid, seed, budget);
    save_json(to_json(res), out);
    PolyMap shifted = f.affine_shift(res.w);
    write_margin_csv(shifted, grid, !shifted.purely_holomorphic(),
                     sibling_with_ext(out, ".csv"));
    if (plot && f.n() == 1) {
        ValueGrid vg =
            sample_polymap_margin(shifted, grid, !shifted.purely_holomorphic());
        write_svg_heatmap(vg, {}, sibling_with_ext(out, ".svg"));
    }
    if (rank_m && !budget_report.empty()) {
        double eta = res.eta;
        int d = std::max(2, f.degree());
        int N = f.m() * (f.n() + 1);
        CoveringBudget budget_info =
            covering_budget(N, d, delta, eta, std::pow(5.0, N), 1.0);
        save_json(to_json(budget_info), budget_report);
    }
    std::cout << "margin " << res.achieved_margin << " |w| " << res.w.norm() << "\n";
    return 0;
}

int run_family(const std::string& input, const std::string& out, double delta,
               double spacing, std::uint64_t seed, int budget) {
    Json j = load_json(input);
    if (!j.contains("maps") || !j["maps"].is_array() || j["maps"].empty())
        throw SchemaError("family input needs a nonempty 'maps' array");
    std::vector<PolyMap> maps;
    for (const auto& mj : j["maps"]) maps.push_back(polymap_from_json(mj));
    Ball ball = Ball::unit(maps[0].n());
    GridSpec grid{ball, spacing > 0 ? spacing
                                    : (maps[0].n() == 1 ? 1.0 / 64.0 : 1.0 / 16.0)};
    ConstantsProfile profile;
    FamilyResult res =
        maps[0].m() == 1
            ? perturb_rank_one_family(maps, delta, profile, grid, seed, budget)
            : perturb_rank_m_family(maps, delta, profile, grid, seed, budget);
    save_json(to_json(res), out);
    std::cout << (res.ok ? "ok" : "continuity budget exceeded") << " steps "
              << res.steps.size() << "\n";
    return res.ok ? 0 : 3;
}

int run_budget(int N, int d, double delta, double eta, const std::string& out) {
    CoveringBudget b = covering_budget(N, d, delta, eta, std::pow(5.0, N), 1.0);
    save_json(to_json(b), out);
    std::cout << "D " << b.D << " M " << b.M << "\n";
    return 0;
}

int run_lemma4(std::uint64_t seed, int matrices, const std::string& out) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_int_distribution<int> mdist(1, 4);
    double worst_dev = 0.0, worst_lr = 0.0, worst_norm = 0.0;
    for (int trial = 0; trial < matrices; ++trial) {
        int m = mdist(rng);
        std::uniform_int_distribution<int> ndist(m, 4);
        int n = ndist(rng);
        CMat L(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) L(i, j) = Complex(uni(rng), uni(rng));
        double sigma = min_singular_value(L);
        double sampled = sampled_min_direction(L, 100000, seed + trial);
        worst_dev = std::max(worst_dev, std::abs(sampled - sigma));
        RightInverse ri = right_inverse(L, std::max(sigma / 2.0, 1e-12));
        if (ri.ok) {
            worst_lr = std::max(
                worst_lr, (L * ri.R - CMat::Identity(m, m)).norm());
            worst_norm =
                std::max(worst_norm, std::abs(spectral_norm(ri.R) * sigma - 1.0));
        }
    }
    Json j{{"matrices", matrices},
           {"max_sampled_deviation", worst_dev},
           {"max_right_inverse_residual", worst_lr},
           {"max_norm_product_deviation", worst_norm}};
    save_json(j, out);
    std::cout << "max deviation " << worst_dev << "\n";
    return worst_dev <= 1e-3 && worst_lr <= 1e-10 && worst_norm <= 1e-8 ? 0 : 3;
}

int run_construct(int n, int k, double region, double delta, std::uint64_t seed,
                  const std::string& out_dir, bool plot) {
    if (n != 1 && n != 2) throw SchemaError("construct: --n must be 1 or 2");
    ModelConfig cfg;
    cfg.n = n;
    cfg.k = k;
    cfg.region = Ball::unit(n).scaled(region);
    fs::create_directories(out_dir);

    SectionField s0(cfg);
    GaussTerm frame;
    frame.center = cfg.region.center;
    frame.a0 = 1.0;
    frame.alin = CVec::Zero(n);
    frame.cutoff_radius = std::numeric_limits<double>::infinity();
    s0.add_term(frame);

    ConstantsProfile profile;
    auto [s_final, report] = global_iteration(cfg, s0, delta, profile, seed);

    Json jsteps = Json::array();
    for (const auto& st : report.steps)
        jsteps.push_back({{"color", st.color},
                          {"delta", st.delta_j},
                          {"active", st.active},
                          {"skipped", st.skipped},
                          {"worst_margin", st.worst_margin},
                          {"interference", st.interference}});
    Json jrep{{"n", n},
              {"k", k},
              {"region", region},
              {"delta0", delta},
              {"seed", seed},
              {"color_steps", report.color_steps},
              {"separation_classes_per_axis", report.separation_classes_per_axis},
              {"eta_goal", report.eta_goal},
              {"eta_star_bookkeeping", report.eta_star_bookkeeping},
              {"eta_star_recertified", report.eta_star_recertified},
              {"steps", jsteps},
              {"ok", report.ok},
              {"failure", report.failure}};

    std::vector<ZeroLocus> zeros;
    int winding = 0;
    if (report.eta_star_recertified > 0) {
        zeros = extract_zero_set(cfg, s_final, report.eta_star_recertified);
        if (n == 1) winding = boundary_winding(cfg, s_final, region);
    }
    Json jz = Json::array();
    for (const auto& z : zeros)
        jz.push_back({{"position", to_json(z.position)},
                      {"abs_ds", z.abs_ds},
                      {"abs_dbar", z.abs_dbar},
                      {"ratio", z.ratio},
                      {"symplectic", z.symplectic},
                      {"chain", z.chain}});
    jrep["zeros"] = jz;
    jrep["zero_count"] = zeros.size();
    if (n == 1) jrep["boundary_winding"] = winding;
    save_json(jrep, (fs::path(out_dir) / "report.json").string());

    double spacing_g1 = 2.0 * region / 256.0;
    write_section_csv(s_final, cfg.region, spacing_g1,
                      (fs::path(out_dir) / "margin_field.csv").string());
    if (n == 1) {
        ValueGrid vg = sample_section_abs(s_final, cfg.region, spacing_g1);
        std::vector<std::pair<double, double>> overlay;
        for (const auto& z : zeros)
            overlay.push_back({z.position[0].real(), z.position[0].imag()});
        write_svg_heatmap(vg, overlay,
                          (fs::path(out_dir) / "section_abs.svg").string());
        write_svg_heatmap(vg, {}, (fs::path(out_dir) / "section_plain.svg").string());
    }
    (void)plot;
    std::cout << "eta* " << report.eta_star_recertified << " zeros " << zeros.size()
              << (n == 1 ? " winding " + std::to_string(winding) : std::string())
              << "\n";
    return report.ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantitative transversality toolkit"};
    app.require_subcommand(1);

    std::string input, out = "out.json", budget_report;
    double delta = 0.1, eta = -1.0, spacing = -1.0, region = 1.0;
    std::uint64_t seed = 0;
    int budget = 512, n = 1, k = 100;
    bool plot = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", input);
        sub->add_option("--out", out);
        sub->add_option("--delta", delta);
        sub->add_option("--eta", eta);
        sub->add_option("--seed", seed);
        sub->add_option("--spacing", spacing);
        sub->add_option("--budget", budget);
        sub->add_option("--n", n);
        sub->add_option("--k", k);
        sub->add_option("--region", region);
        sub->add_flag("--plot", plot);
    };

    CLI::App* certify = app.add_subcommand("certify", "certify a margin over a ball");
    add_common(certify);
    CLI::App* p1 = app.add_subcommand("perturb-1", "rank-one affine perturbation");
    add_common(p1);
    CLI::App* pm = app.add_subcommand("perturb-m", "higher-rank affine perturbation");
    add_common(pm);
    pm->add_option("--budget-report", budget_report);
    CLI::App* fam = app.add_subcommand("family", "one-parameter family tracking");
    add_common(fam);
    CLI::App* cons = app.add_subcommand("construct", "flat-model global construction");
    add_common(cons);
    CLI::App* bud = app.add_subcommand("budget", "covering budget report (--n is N, --k is the degree d)");
    add_common(bud);
    CLI::App* l4 = app.add_subcommand("lemma4-check", "singular-value equivalence sampling");
    add_common(l4);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(certify))
            return run_certify(input, out, spacing, region, plot);
        if (app.got_subcommand(p1) || app.got_subcommand(pm)) {
            if (!(delta > 0 && delta < 0.25)) {
                std::cerr << "delta must lie in (0, 1/4)\n";
                return 1;
            }
            return run_perturb(app.got_subcommand(pm), input, out, delta, eta,
                               spacing, seed, budget, budget_report, plot);
        }
        if (app.got_subcommand(fam)) {
            if (!(delta > 0 && delta < 0.25)) {
                std::cerr << "delta must lie in (0, 1/4)\n";
                return 1;
            }
            return run_family(input, out, delta, spacing, seed, budget);
        }
        if (app.got_subcommand(cons))
            return run_construct(n, k, region, delta, seed,
                                 out.empty() ? "run" : out, plot);
        if (app.got_subcommand(bud)) {
            if (eta <= 0) {
                std::cerr << "budget needs --eta\n";
                return 1;
            }
            return run_budget(n, k, delta, eta, out);
        }
        if (app.got_subcommand(l4)) return run_lemma4(seed, budget, out);
    } catch (const SchemaError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const HypothesisViolation& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return 2;
    } catch (const SearchFailure& e) {
        std::cerr << "search failure: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
