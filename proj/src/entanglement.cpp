#include "entroprod/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace entroprod::entanglement {

using linalg::FactorLayout;
using linalg::hermitian_eig;
using linalg::hermitian_eigenvalues;
using linalg::hermitize;
using linalg::max_abs;
using linalg::RealVector;

namespace {

const FactorLayout kTwoQubits{2, 2};

double binary_entropy(double p) {
    double s = 0.0;
    if (p > 0.0) s -= p * std::log(p);
    if (1.0 - p > 0.0) s -= (1.0 - p) * std::log(1.0 - p);
    return s;
}

void require_two_qubits(const DensityMatrix& rho, const char* where) {
    if (rho.layout.dims == std::vector<int>{2, 2}) return;
    std::ostringstream os;
    os << where << ": requires a two-qubit (2,2) layout";
    if (rho.dim() != 4) throw UnsupportedDimensionError(os.str());
    throw LayoutMismatchError(os.str());
}

}  // namespace

DensityMatrix x_family_density(const XFamilyState& x) {
    if (x.a < 0.0 || x.a > 1.0) throw Error("x_family_density: population outside [0,1]");
    const double bound = std::sqrt(std::max(x.a * (1.0 - x.a), 0.0));
    if (std::abs(x.m) > bound + 1e-12) {
        std::ostringstream os;
        os << "x_family_density: |m| = " << std::abs(x.m) << " exceeds sqrt(a(1-a)) = " << bound;
        throw NotPsdError(os.str());
    }
    Operator op = Operator::Zero(4, 4);
    op(0, 0) = x.a;
    op(3, 3) = 1.0 - x.a;
    op(0, 3) = x.m;
    op(3, 0) = std::conj(x.m);
    return {std::move(op), kTwoQubits};
}

std::optional<XFamilyState> as_x_family(const DensityMatrix& rho, double tol) {
    if (rho.dim() != 4) return std::nullopt;
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            const bool corner = (i == 0 && j == 3) || (i == 3 && j == 0);
            const bool edge = (i == 0 && j == 0) || (i == 3 && j == 3);
            if (!corner && !edge && std::abs(rho.op(i, j)) > tol) return std::nullopt;
        }
    }
    return XFamilyState{rho.op(0, 0).real(), rho.op(0, 3)};
}

double negativity(const DensityMatrix& rho, const std::vector<int>& side_a) {
    const int nf = rho.layout.factors();
    if (nf < 2) throw LayoutMismatchError("negativity: need a bipartite layout");
    std::vector<bool> in_a(nf, false);
    for (int f : side_a) {
        if (f < 0 || f >= nf) throw LayoutMismatchError("negativity: factor out of range");
        in_a[f] = true;
    }
    Operator pt = rho.op;
    for (int f = 0; f < nf; ++f) {
        if (!in_a[f]) pt = linalg::partial_transpose(pt, rho.layout, f);
    }
    const RealVector lam = hermitian_eigenvalues(pt);
    double neg = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < 0.0) neg -= lam(i);
    }
    return neg;
}

double negativity(const DensityMatrix& rho) { return negativity(rho, {0}); }

double concurrence(const DensityMatrix& rho) {
    require_two_qubits(rho, "concurrence");
    const Operator yy = linalg::kron(linalg::pauli_y(), linalg::pauli_y());
    const Operator rho_tilde = yy * rho.op.conjugate() * yy;
    // Same spectrum as rho * rho_tilde, computed through the symmetric
    // product sqrt(rho) rho_tilde sqrt(rho).
    const auto eig = hermitian_eig(rho.op);
    Operator sqrt_rho = Operator::Zero(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        const double lam = std::max(eig.values(i), 0.0);
        sqrt_rho += std::sqrt(lam) * (eig.vectors.col(i) * eig.vectors.col(i).adjoint());
    }
    const RealVector mu = hermitian_eigenvalues(hermitize(sqrt_rho * rho_tilde * sqrt_rho));
    double c = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) {
        const double lam = std::sqrt(std::max(mu(i), 0.0));
        c += (i == 3 ? lam : -lam);  // ascending order: largest enters positively
    }
    return std::clamp(c, 0.0, 1.0);
}

EntropyValue ree_x_family(const XFamilyState& x) {
    const double disc = (2.0 * x.a - 1.0) * (2.0 * x.a - 1.0) + 4.0 * std::norm(x.m);
    const double lam_plus = 0.5 * (1.0 + std::sqrt(std::min(disc, 1.0)));
    return EntropyValue::finite(binary_entropy(x.a) - binary_entropy(lam_plus));
}

// ------------------------- REE optimizer internals --------------------------

namespace {

// Euclidean projection of a real vector onto the probability simplex.
RealVector project_simplex(RealVector v) {
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    int rho_idx = 0;
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
        cum += u[i];
        const double t = (cum - 1.0) / (i + 1);
        if (u[i] - t > 0.0) {
            rho_idx = i;
            css = cum;
        }
    }
    theta = (css - 1.0) / (rho_idx + 1);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = std::max(v(i) - theta, 0.0);
    return v;
}

// Projection onto {sigma >= 0, tr sigma = 1}: eigenvalue simplex projection.
Operator project_state_set(const Operator& x) {
    const auto eig = hermitian_eig(hermitize(x));
    const RealVector lam = project_simplex(eig.values);
    Operator out = Operator::Zero(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) > 0.0) out += lam(i) * (eig.vectors.col(i) * eig.vectors.col(i).adjoint());
    }
    return out;
}

Operator transpose_b(const Operator& x) {
    return linalg::partial_transpose(x, kTwoQubits, 1);
}

// Dykstra's alternating projections between the state set and the PPT set
// (the latter projected through the partial-transpose isometry).
Operator dykstra_project(Operator x, const ReeOptions& opts) {
    x = hermitize(x);
    Operator p = Operator::Zero(4, 4);
    Operator q = Operator::Zero(4, 4);
    Operator y = x;
    for (int it = 0; it < opts.dykstra_max; ++it) {
        y = project_state_set(x + p);
        p = x + p - y;
        x = transpose_b(project_state_set(transpose_b(y + q)));
        q = y + q - x;
        if (max_abs(x - y) <= opts.dykstra_tol) break;
    }
    return y;  // feasible in {PSD, trace 1}, PPT within the residual
}

struct Objective {
    double tr_rho_ln_rho = 0.0;
    const Operator* rho = nullptr;
    double floor = 1e-12;

    // S(rho||sigma) with sigma eigenvalues floored before logs.
    double value(const linalg::EigDecomposition& sig_eig) const {
        double tr_rho_ln_sigma = 0.0;
        for (Eigen::Index i = 0; i < sig_eig.values.size(); ++i) {
            const double lam = std::max(sig_eig.values(i), floor);
            const double w = (sig_eig.vectors.col(i).adjoint() * (*rho) * sig_eig.vectors.col(i))(0).real();
            tr_rho_ln_sigma += std::log(lam) * w;
        }
        return tr_rho_ln_rho - tr_rho_ln_sigma;
    }

    // Gradient of -tr(rho ln sigma) via the Frechet derivative of ln in
    // sigma's eigenbasis: divided differences (ln li - ln lj)/(li - lj),
    // diagonal 1/li.
    Operator gradient(const linalg::EigDecomposition& sig_eig) const {
        const Eigen::Index n = sig_eig.values.size();
        RealVector lam(n);
        for (Eigen::Index i = 0; i < n; ++i) lam(i) = std::max(sig_eig.values(i), floor);
        const Operator rho_t = sig_eig.vectors.adjoint() * (*rho) * sig_eig.vectors;
        Operator k(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const double li = lam(i), lj = lam(j);
                const double g = std::abs(li - lj) < 1e-14 * std::max(li, lj)
                                     ? 1.0 / li
                                     : (std::log(li) - std::log(lj)) / (li - lj);
                k(i, j) = rho_t(i, j) * g;
            }
        }
        return -hermitize(sig_eig.vectors * k * sig_eig.vectors.adjoint());
    }
};

}  // namespace

SeparableApproximation ree_optimize(const DensityMatrix& rho, const ReeOptions& opts) {
    require_two_qubits(rho, "ree_optimize");

    Objective obj;
    obj.rho = &rho.op;
    obj.floor = opts.eig_floor;
    {
        const RealVector lam = hermitian_eigenvalues(rho.op);
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
            if (lam(i) > linalg::kSupportCutoff) obj.tr_rho_ln_rho += lam(i) * std::log(lam(i));
        }
    }

    Operator sigma = dykstra_project(rho.op, opts);
    auto sig_eig = hermitian_eig(sigma);
    double f = obj.value(sig_eig);
    if (opts.warm_start != nullptr) {
        Operator alt = dykstra_project(*opts.warm_start, opts);
        auto alt_eig = hermitian_eig(alt);
        const double fa = obj.value(alt_eig);
        if (fa < f) {
            sigma = std::move(alt);
            sig_eig = std::move(alt_eig);
            f = fa;
        }
    }

    SeparableApproximation result;
    if (opts.record_objective) result.objective_trace.push_back(f);

    double step = 1.0;
    int stall = 0;
    int iter = 0;
    bool converged = false;
    for (; iter < opts.max_iterations; ++iter) {
        const Operator grad = obj.gradient(sig_eig);
        bool accepted = false;
        double t = step;
        Operator cand;
        linalg::EigDecomposition cand_eig;
        double fc = f;
        for (int bt = 0; bt < 40; ++bt) {
            cand = dykstra_project(sigma - t * grad, opts);
            cand_eig = hermitian_eig(cand);
            fc = obj.value(cand_eig);
            if (fc < f) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            converged = true;  // no descent direction left at this scale
            break;
        }
        const double decrease = f - fc;
        sigma = std::move(cand);
        sig_eig = std::move(cand_eig);
        f = fc;
        step = std::min(t * 2.0, 4.0);
        if (opts.record_objective) result.objective_trace.push_back(f);
        stall = decrease < opts.stall_tol ? stall + 1 : 0;
        if (stall >= opts.stall_window) {
            converged = true;
            ++iter;
            break;
        }
    }

    result.sep = states::make_density(sigma, rho.layout);
    result.value = EntropyValue::finite(f);
    result.ppt_min_eig = hermitian_eigenvalues(transpose_b(sigma)).minCoeff();
    result.iterations = iter;
    result.converged = converged;  // MaxIterations: best iterate, converged=false
    return result;
}

DensityMatrix closest_separable(const DensityMatrix& rho) {
    require_two_qubits(rho, "closest_separable");
    if (const auto x = as_x_family(rho)) {
        return x_family_density({x->a, 0.0});
    }
    return ree_optimize(rho).sep;
}

}  // namespace entroprod::entanglement
