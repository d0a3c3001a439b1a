#pragma once

#include <cstdint>
#include <vector>

#include "entroprod/linalg.hpp"

namespace entroprod::states {

using linalg::Complex;
using linalg::FactorLayout;
using linalg::Operator;

inline constexpr double kDensityTol = 1e-10;
inline constexpr double kSupportMassTol = 1e-10;

// Validated Hermitian, positive semidefinite, unit-trace operator over a
// declared tensor-factor layout.  Construct through make_density.
struct DensityMatrix {
    Operator op;
    FactorLayout layout;

    Eigen::Index dim() const { return op.rows(); }
};

// Entropy in nats, or the distinguished Infinite value (relative entropy
// with support violation).
struct EntropyValue {
    double nats = 0.0;
    bool infinite = false;

    static EntropyValue finite(double v);
    static EntropyValue inf() { return {0.0, true}; }
};

DensityMatrix make_density(Operator op, FactorLayout layout);

// Same matrix, reinterpreted under a new factor split of equal total dim.
DensityMatrix relabel(const DensityMatrix& rho, FactorLayout layout);

EntropyValue von_neumann_entropy(const DensityMatrix& rho);
EntropyValue relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

// S(rho_A) + S(rho_B) - S(rho_AB) across the bipartition (side_a, complement).
EntropyValue mutual_information(const DensityMatrix& rho, const std::vector<int>& side_a);

// exp(-beta h)/Z with the max eigenvalue of -beta h subtracted before
// exponentiation; single-factor layout.
DensityMatrix thermal_state(const Operator& h, double beta);

// Projector onto a Haar-uniform unit vector (normalized complex Gaussian).
DensityMatrix random_pure(int dim, std::uint64_t seed);
// G G^dag / tr(G G^dag) for a dim x dim complex Gaussian G.
DensityMatrix random_mixed(int dim, std::uint64_t seed);

}  // namespace entroprod::states
