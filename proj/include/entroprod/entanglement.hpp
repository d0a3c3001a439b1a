#pragma once

#include <optional>
#include <vector>

#include "entroprod/states.hpp"

namespace entroprod::entanglement {

using linalg::Complex;
using linalg::Operator;
using states::DensityMatrix;
using states::EntropyValue;

// Two-qubit state supported on {|00>, |11>} populations plus the single
// coherence between them: diag(a, 0, 0, 1-a) with corners m, conj(m).
struct XFamilyState {
    double a = 0.5;
    Complex m = 0.0;
};

DensityMatrix x_family_density(const XFamilyState& x);
// Recognizes the embedding above (middle populations exactly zero up to tol).
std::optional<XFamilyState> as_x_family(const DensityMatrix& rho, double tol = 1e-12);

// Sum of |negative eigenvalues| of the partial transpose on the second side
// of the bipartition (side_a, complement).
double negativity(const DensityMatrix& rho, const std::vector<int>& side_a);
double negativity(const DensityMatrix& rho);  // two-factor layout, cut {0}

// Wootters concurrence for two qubits.
double concurrence(const DensityMatrix& rho);

// S(diag rho) - S(rho); the closed-form relative entropy of entanglement
// for the X family (closest separable state at mu = 0).
EntropyValue ree_x_family(const XFamilyState& x);

struct ReeOptions {
    int max_iterations = 5000;
    double stall_tol = 1e-9;   // converged when value decrease < stall_tol
    int stall_window = 10;     // ... over this many iterations
    int dykstra_max = 500;
    double dykstra_tol = 1e-10;
    double eig_floor = 1e-12;  // sigma eigenvalues floored before logs
    bool record_objective = false;
    const Operator* warm_start = nullptr;  // initial iterate (projected first)
};

struct SeparableApproximation {
    DensityMatrix sep;
    EntropyValue value;
    double ppt_min_eig = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;  // filled when record_objective
};

// Minimizes S(rho||sigma) over two-qubit PPT states by projected gradient
// descent; Dykstra's alternating projections between {PSD, trace 1} and the
// PPT set supply the feasibility projection.
SeparableApproximation ree_optimize(const DensityMatrix& rho, const ReeOptions& opts = {});

// The minimizer only; X-family inputs use the mu = 0 closed form directly.
DensityMatrix closest_separable(const DensityMatrix& rho);

}  // namespace entroprod::entanglement
