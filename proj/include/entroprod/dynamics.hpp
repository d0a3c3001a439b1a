#pragma once

#include <vector>

#include "entroprod/states.hpp"

namespace entroprod::dynamics {

using linalg::FactorLayout;
using linalg::Operator;
using states::DensityMatrix;

// Hamiltonian (inverse time, hbar = 1) plus jump operators (square-root
// inverse time) generating Lindblad dynamics.
struct LindbladModel {
    Operator h;
    std::vector<Operator> jumps;
    FactorLayout layout;
};

LindbladModel make_model(Operator h, std::vector<Operator> jumps, FactorLayout layout);

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    LindbladModel model;
};

struct StationaryOptions {
    double rhs_tol = 1e-9;
    double degenerate_tol = 1e-9;   // second-smallest singular value threshold
    double fallback_horizon = 1e4;  // NoConvergence beyond this time
};

struct StationaryResult {
    DensityMatrix state;
    bool unique = true;  // false flags NonUniqueStationary
};

// (1/i)[H,rho] - (1/2) sum { G^dag G rho + rho G^dag G - 2 G rho G^dag }.
Operator lindblad_rhs(const LindbladModel& model, const Operator& rho);

// Combined rate scale used to pick the default integrator step.
double rate_scale(const LindbladModel& model);
// min(0.01 / rate_scale, spacing), snapped so the spacing is an exact multiple.
double default_step(const LindbladModel& model, double grid_spacing);

// Classical fixed-step RK4; every emitted state is hermitized, trace
// renormalized, and rejected if an eigenvalue drops below -1e-8.
Trajectory integrate(const LindbladModel& model, const DensityMatrix& rho0,
                     const std::vector<double>& grid, double step);
Trajectory integrate(const LindbladModel& model, const DensityMatrix& rho0,
                     const std::vector<double>& grid);

// One jump/no-jump CP-map step: W0 = 1 - i Htilde dt, Wk = sqrt(dt) Gk,
// renormalized by the trace.
DensityMatrix kraus_step(const LindbladModel& model, const DensityMatrix& rho, double dt);

// d^2 x d^2 superoperator matrix in the column-stacking convention
// (vec(A X B) = (B^T kron A) vec X).
Operator superoperator_matrix(const LindbladModel& model);

// Null vector of the superoperator via the smallest singular direction;
// integrates from the maximally mixed state when the null space is
// degenerate (unique = false).
StationaryResult stationary_state(const LindbladModel& model,
                                  const StationaryOptions& opts = {});

// Spohn entropy production -tr(rhs * (ln rho - ln ref)) in nats/time.
// Returns +infinity when rho's support is unstable or escapes ref's support.
// Without an explicit reference the model's stationary state is used.
double entropy_production(const LindbladModel& model, const DensityMatrix& rho,
                          const DensityMatrix& ref);
double entropy_production(const LindbladModel& model, const DensityMatrix& rho);

}  // namespace entroprod::dynamics
