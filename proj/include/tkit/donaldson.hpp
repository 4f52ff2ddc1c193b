#pragma once

#include <string>
#include <utility>

#include "tkit/prop3.hpp"
#include "tkit/section.hpp"

namespace tkit {

// One local perturbation: tau = -(w0 + sum w_i u_i) * (chart scale) * s_ref,
// certified on the cover ball around its center.
struct LocalPerturbation {
    bool perturbed = false;
    GaussTerm tau;             // zero coefficients when skipped
    PerturbationResult inner;  // chart-level solver output (when perturbed)
    double section_margin = 0.0;  // certified margin of s + tau on the ball
    double tau_c1 = 0.0;          // certified sup of |tau|_{C1, g_k}
    double fit_err = 0.0;         // certified chart C^1 fit error
    double rescale = 1.0;         // chart normalization factor
};

// Perturb the section near x (g_1 coordinates) so that s + tau is
// transverse on the g_k cover ball, keeping |tau|_{C1,g_k} <= delta.
LocalPerturbation local_perturbation(const ModelConfig& cfg, const SectionField& field,
                                     const CVec& x, double delta,
                                     const ConstantsProfile& profile,
                                     std::uint64_t seed);

struct StepRecord {
    int color = 0;
    double delta_j = 0.0;
    int active = 0;
    int skipped = 0;
    double worst_margin = 0.0;   // over this step's perturbed balls
    double interference = 0.0;   // largest damage bound applied this step
};

struct BallRecord {
    CVec center;
    int color = 0;
    bool perturbed = false;
    double delta_used = 0.0;
    double margin_bookkeeping = 0.0;  // margin after all later damage
    double margin_recertified = 0.0;
    bool failed = false;
};

struct GlobalReport {
    std::vector<StepRecord> steps;
    int color_steps = 0;
    int separation_classes_per_axis = 0;
    double eta_goal = 0.0;
    double eta_star_bookkeeping = 0.0;
    double eta_star_recertified = 0.0;
    std::vector<BallRecord> balls;
    bool ok = false;
    std::string failure;
};

// Color-scheduled global iteration: cover centers are split into separation
// classes, each class is processed in one step (deterministic center order),
// already-transverse balls are skipped, and every applied perturbation is
// charged against the certified margins of previously processed balls via
// its decay envelope. Ends with an independent recertification.
std::pair<SectionField, GlobalReport> global_iteration(const ModelConfig& cfg,
                                                       const SectionField& s0,
                                                       double delta0,
                                                       const ConstantsProfile& profile,
                                                       std::uint64_t seed);

struct ZeroLocus {
    CVec position;  // g_1 coordinates
    double abs_ds = 0.0;
    double abs_dbar = 0.0;
    double ratio = 0.0;  // |dbar s| / |ds|
    bool symplectic = false;
    int chain = -1;  // slice-chain id for n == 2; -1 for isolated zeros
};

// Zero set of a certified-transverse section: winding + Newton polish for
// n == 1, slice tracking for n == 2. Rejects sections without a positive
// certified margin.
std::vector<ZeroLocus> extract_zero_set(const ModelConfig& cfg, const SectionField& s,
                                        double certified_margin);

// Total winding of s along the boundary circle of the region (n == 1).
int boundary_winding(const ModelConfig& cfg, const SectionField& s, double radius_g1);

// Certified lower bound for the section margin over a g_k ball (engine
// coordinates are g_1; margins are g_k quantities).
double certified_section_margin(const SectionField& field, const CVec& center_g1,
                                double radius_gk, double target,
                                std::size_t max_cells = 60000);

}  // namespace tkit
