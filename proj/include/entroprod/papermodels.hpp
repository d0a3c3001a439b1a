#pragma once

#include <utility>
#include <vector>

#include "entroprod/dynamics.hpp"
#include "entroprod/entanglement.hpp"

namespace entroprod::papermodels {

using dynamics::LindbladModel;
using states::DensityMatrix;

// The five scalars parameterizing the dissipative two-qubit model and its
// closed-form solution: initial |00> population a0^2, natural frequency
// omega, decay gamma, excitation kappa, dephasing eta.
struct PaperModelParams {
    double a0sq = 0.5;
    double omega = 0.0;
    double gamma = 0.0;
    double kappa = 0.0;
    double eta = 0.0;
};

void validate(const PaperModelParams& p);

// Population a(t) = delta(t) a0^2 + delta'(t) and its time derivative.
double population(const PaperModelParams& p, double t);
double population_rate(const PaperModelParams& p, double t);
// mu(t) = exp(-i omega t - (gamma+kappa+eta) t / 2).
linalg::Complex coherence_factor(const PaperModelParams& p, double t);

// The X-family state with populations (a(t), 1-a(t)) and corner mu(t) a b.
DensityMatrix closed_form_state(const PaperModelParams& p, double t);

// Collective-operator calibration reproducing the closed form:
//   G1 = sqrt(gamma) |00><11|, G2 = sqrt(kappa) |11><00|,
//   G3 = (sqrt(eta)/2) (sigma_z x 1), H = (omega/2) (sigma_z x 1).
// When verify is set the model is cross-checked against the closed form and
// CalibrationError is thrown if the trace distance exceeds 1e-6.
LindbladModel paper_lindblad_model(const PaperModelParams& p, bool verify = true);

// Max trace distance between the integrated model and the closed form on a
// uniform grid over [t0, t0 + 5/maxrate].
double calibration_error(const PaperModelParams& p, int grid_points = 20);

// ------------------------------ collision model -----------------------------

enum class EnvKind { pure, dephased_mixed };

struct CollisionConfig {
    double a0sq = 0.5;
    double eta = 1.0;
    double total_time = 1.0;
    int k = 1;
    EnvKind env_kind = EnvKind::pure;
    bool retain_environment = false;
};

void validate(const CollisionConfig& cfg);

struct CollisionStep {
    int step = 0;
    double time = 0.0;
    double coherence = 0.0;      // |<00| rho_AB |11>|
    double s_ab = 0.0;           // S(rho_AB), nats
    double e_ab = 0.0;           // REE of rho_AB, nats
    double delta_e = 0.0;        // E(step) - E(0)
    double s_env = 0.0;          // joint entropy of the used units
    double mi_ab_env = 0.0;      // I(AB : env)
    double delta_s_total = 0.0;  // (S_AB + S_env) - initial
    double ssa_slack = 0.0;      // S_AB + S_BE - S_ABE - S_B (>= 0)
};

struct CollisionAudit {
    std::vector<CollisionStep> steps;  // length k+1 including the initial point
    double final_overlap = 1.0;        // (1 - eta t / k)^k
};

// Repeated two-branch controlled interactions with fresh environment units.
// Traced mode (default) discards each unit after its collision; retained
// mode keeps the whole environment (k <= 14 pure, k <= 10 mixed).
std::pair<DensityMatrix, CollisionAudit> collision_run(const CollisionConfig& cfg);

// (1 - eta t / k)^k, evaluated as the exact iterated product.
double overlap_after_k(double eta, double t, int k);

// Retained-environment audits; env-dependent columns are exact here.
CollisionAudit collision_audits(const CollisionConfig& cfg);

}  // namespace entroprod::papermodels
