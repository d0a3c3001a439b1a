#include "entroprod/states.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace entroprod::states {

using linalg::hermitian_eig;
using linalg::hermitian_eigenvalues;
using linalg::max_abs;
using linalg::Operator;
using linalg::RealVector;

EntropyValue EntropyValue::finite(double v) {
    if (v < 0.0) v = 0.0;
    return {v, false};
}

DensityMatrix make_density(Operator op, FactorLayout layout) {
    if (op.rows() != op.cols()) throw NonHermitianError("make_density: matrix not square");
    layout.require_dim(op.rows());

    const double herm_defect = max_abs(op - op.adjoint());
    if (herm_defect > kDensityTol) {
        std::ostringstream os;
        os << "make_density: NonHermitian, ||op - op^dag||_max = " << herm_defect;
        throw NonHermitianError(os.str());
    }
    const double tr = op.trace().real();
    if (std::abs(tr - 1.0) > kDensityTol) {
        std::ostringstream os;
        os << "make_density: NonUnitTrace, |tr - 1| = " << std::abs(tr - 1.0);
        throw NonUnitTraceError(os.str());
    }
    const RealVector lam = hermitian_eigenvalues(op);
    if (lam(0) < -kDensityTol) {
        std::ostringstream os;
        os << "make_density: NotPSD, min eigenvalue = " << lam(0);
        throw NotPsdError(os.str());
    }
    if (lam(lam.size() - 1) > 1.0 + kDensityTol) {
        std::ostringstream os;
        os << "make_density: NotPSD, max eigenvalue = " << lam(lam.size() - 1) << " exceeds 1";
        throw NotPsdError(os.str());
    }
    return {std::move(op), std::move(layout)};
}

DensityMatrix relabel(const DensityMatrix& rho, FactorLayout layout) {
    layout.require_dim(rho.dim());
    return {rho.op, std::move(layout)};
}

EntropyValue von_neumann_entropy(const DensityMatrix& rho) {
    const RealVector lam = hermitian_eigenvalues(rho.op);
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) > linalg::kSupportCutoff) s -= lam(i) * std::log(lam(i));
    }
    return EntropyValue::finite(s);
}

EntropyValue relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimMismatchError("relative_entropy: dimension mismatch");

    const auto sig = hermitian_eig(sigma.op);
    // Support test: mass of rho inside sigma's kernel.
    double kernel_mass = 0.0;
    std::vector<Eigen::Index> kernel;
    for (Eigen::Index i = 0; i < sig.values.size(); ++i) {
        if (sig.values(i) <= linalg::kSupportCutoff) kernel.push_back(i);
    }
    if (!kernel.empty()) {
        Operator vk(rho.dim(), static_cast<Eigen::Index>(kernel.size()));
        for (std::size_t c = 0; c < kernel.size(); ++c) vk.col(static_cast<Eigen::Index>(c)) = sig.vectors.col(kernel[c]);
        kernel_mass = max_abs(vk.adjoint() * rho.op * vk);
        if (kernel_mass > kSupportMassTol) return EntropyValue::inf();
    }

    double tr_rho_ln_rho = 0.0;
    const RealVector lam = hermitian_eigenvalues(rho.op);
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) > linalg::kSupportCutoff) tr_rho_ln_rho += lam(i) * std::log(lam(i));
    }
    Operator ln_sigma = Operator::Zero(sigma.dim(), sigma.dim());
    for (Eigen::Index i = 0; i < sig.values.size(); ++i) {
        if (sig.values(i) > linalg::kSupportCutoff) {
            ln_sigma += std::log(sig.values(i)) * (sig.vectors.col(i) * sig.vectors.col(i).adjoint());
        }
    }
    const double tr_rho_ln_sigma = (rho.op * ln_sigma).trace().real();
    return EntropyValue::finite(tr_rho_ln_rho - tr_rho_ln_sigma);
}

EntropyValue mutual_information(const DensityMatrix& rho, const std::vector<int>& side_a) {
    const int nf = rho.layout.factors();
    if (nf < 2) throw LayoutMismatchError("mutual_information: need at least two factors");
    if (side_a.empty() || static_cast<int>(side_a.size()) >= nf) {
        throw LayoutMismatchError("mutual_information: side A must be a proper nonempty subset");
    }
    std::vector<bool> in_a(nf, false);
    for (int f : side_a) {
        if (f < 0 || f >= nf) throw LayoutMismatchError("mutual_information: factor out of range");
        in_a[f] = true;
    }
    std::vector<int> side_b;
    for (int f = 0; f < nf; ++f) {
        if (!in_a[f]) side_b.push_back(f);
    }

    auto marginal_entropy = [&](const std::vector<int>& keep) {
        const Operator red = linalg::partial_trace(rho.op, rho.layout, keep);
        const RealVector lam = hermitian_eigenvalues(red);
        double s = 0.0;
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
            if (lam(i) > linalg::kSupportCutoff) s -= lam(i) * std::log(lam(i));
        }
        return s;
    };
    const double s_ab = von_neumann_entropy(rho).nats;
    return EntropyValue::finite(marginal_entropy(side_a) + marginal_entropy(side_b) - s_ab);
}

DensityMatrix thermal_state(const Operator& h, double beta) {
    if (!linalg::is_hermitian(h)) throw NonHermitianError("thermal_state: h not Hermitian");
    if (beta < 0.0) throw Error("thermal_state: beta must be nonnegative");
    const auto eig = hermitian_eig(h);
    // Subtract the largest exponent to avoid overflow at large beta.
    const double shift = (-beta * eig.values).maxCoeff();
    RealVector w(eig.values.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::exp(-beta * eig.values(i) - shift);
    w /= w.sum();
    Operator rho = Operator::Zero(h.rows(), h.cols());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        rho += w(i) * (eig.vectors.col(i) * eig.vectors.col(i).adjoint());
    }
    return make_density(std::move(rho), FactorLayout{static_cast<int>(h.rows())});
}

namespace {

Operator gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Operator m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double re = g(rng);
            const double im = g(rng);
            m(i, j) = Complex(re, im);
        }
    }
    return m;
}

}  // namespace

DensityMatrix random_pure(int dim, std::uint64_t seed) {
    if (dim < 2) throw Error("random_pure: dim must be >= 2");
    Eigen::VectorXcd psi = gaussian_matrix(dim, 1, seed);
    psi /= psi.norm();
    return make_density(psi * psi.adjoint(), FactorLayout{dim});
}

DensityMatrix random_mixed(int dim, std::uint64_t seed) {
    if (dim < 2) throw Error("random_mixed: dim must be >= 2");
    const Operator g = gaussian_matrix(dim, dim, seed);
    Operator rho = g * g.adjoint();
    rho /= rho.trace().real();
    return make_density(linalg::hermitize(rho), FactorLayout{dim});
}

}  // namespace entroprod::states
