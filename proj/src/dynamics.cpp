#include "entroprod/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace entroprod::dynamics {

using linalg::Complex;
using linalg::hermitian_eig;
using linalg::hermitian_eigenvalues;
using linalg::hermitize;
using linalg::kron;
using linalg::max_abs;
using linalg::RealVector;

LindbladModel make_model(Operator h, std::vector<Operator> jumps, FactorLayout layout) {
    layout.require_dim(h.rows());
    if (!linalg::is_hermitian(h)) {
        std::ostringstream os;
        os << "make_model: h not Hermitian, defect " << max_abs(h - h.adjoint());
        throw NonHermitianError(os.str());
    }
    for (const auto& g : jumps) {
        if (g.rows() != h.rows() || g.cols() != h.cols()) {
            throw DimMismatchError("make_model: jump operator dimension mismatch");
        }
    }
    return {std::move(h), std::move(jumps), std::move(layout)};
}

Operator lindblad_rhs(const LindbladModel& model, const Operator& rho) {
    if (rho.rows() != model.h.rows() || rho.cols() != model.h.cols()) {
        throw DimMismatchError("lindblad_rhs: state dimension mismatch");
    }
    const Complex minus_i(0.0, -1.0);
    Operator out = minus_i * (model.h * rho - rho * model.h);
    for (const auto& g : model.jumps) {
        const Operator gg = g.adjoint() * g;
        out += g * rho * g.adjoint() - 0.5 * (gg * rho + rho * gg);
    }
    return out;
}

double rate_scale(const LindbladModel& model) {
    auto spectral_norm = [](const Operator& herm) {
        const RealVector lam = hermitian_eigenvalues(herm);
        return std::max(std::abs(lam(0)), std::abs(lam(lam.size() - 1)));
    };
    double r = spectral_norm(model.h);
    for (const auto& g : model.jumps) r += spectral_norm(g.adjoint() * g);
    return r;
}

double default_step(const LindbladModel& model, double grid_spacing) {
    const double rate = std::max(rate_scale(model), 1e-12);
    const double raw = std::min(0.01 / rate, grid_spacing);
    const int n = static_cast<int>(std::ceil(grid_spacing / raw - 1e-9));
    return grid_spacing / std::max(n, 1);
}

namespace {

Operator rk4_step(const LindbladModel& model, const Operator& rho, double h) {
    const Operator k1 = lindblad_rhs(model, rho);
    const Operator k2 = lindblad_rhs(model, rho + 0.5 * h * k1);
    const Operator k3 = lindblad_rhs(model, rho + 0.5 * h * k2);
    const Operator k4 = lindblad_rhs(model, rho + h * k3);
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

DensityMatrix revalidate(Operator rho, const FactorLayout& layout, double t) {
    rho = hermitize(rho);
    rho /= rho.trace().real();
    const RealVector lam = hermitian_eigenvalues(rho);
    if (lam(0) < -1e-8) {
        std::ostringstream os;
        os << "integrate: state invalid at t = " << t << ", min eigenvalue " << lam(0);
        throw StateInvalidError(os.str(), t);
    }
    return {std::move(rho), layout};
}

}  // namespace

Trajectory integrate(const LindbladModel& model, const DensityMatrix& rho0,
                     const std::vector<double>& grid, double step) {
    if (step <= 0.0) throw Error("integrate: step must be positive");
    if (grid.empty()) throw Error("integrate: empty grid");
    if (rho0.dim() != model.h.rows()) throw DimMismatchError("integrate: state/model mismatch");

    Trajectory traj;
    traj.model = model;
    traj.times = grid;
    traj.states.reserve(grid.size());

    Operator rho = rho0.op;
    traj.states.push_back(revalidate(rho, model.layout, grid[0]));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double span = grid[i] - grid[i - 1];
        if (span <= 0.0) throw Error("integrate: grid not strictly increasing");
        const double ratio = span / step;
        const long n = std::lround(ratio);
        if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-6 * std::max(1.0, ratio)) {
            throw Error("integrate: grid spacing is not a multiple of the step");
        }
        const double h = span / static_cast<double>(n);
        for (long s = 0; s < n; ++s) rho = rk4_step(model, rho, h);
        traj.states.push_back(revalidate(rho, model.layout, grid[i]));
        rho = traj.states.back().op;
    }
    return traj;
}

Trajectory integrate(const LindbladModel& model, const DensityMatrix& rho0,
                     const std::vector<double>& grid) {
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < grid.size(); ++i) spacing = std::min(spacing, grid[i] - grid[i - 1]);
    if (!std::isfinite(spacing)) spacing = 1.0;
    return integrate(model, rho0, grid, default_step(model, spacing));
}

DensityMatrix kraus_step(const LindbladModel& model, const DensityMatrix& rho, double dt) {
    if (dt <= 0.0) throw Error("kraus_step: dt must be positive");
    const Eigen::Index d = rho.dim();
    Operator gg_sum = Operator::Zero(d, d);
    for (const auto& g : model.jumps) gg_sum += g.adjoint() * g;
    const Operator h_eff = model.h - Complex(0.0, 0.5) * gg_sum;  // Htilde
    const Operator w0 = Operator::Identity(d, d) - Complex(0.0, 1.0) * dt * h_eff;

    Operator out = w0 * rho.op * w0.adjoint();
    for (const auto& g : model.jumps) out += dt * (g * rho.op * g.adjoint());
    out = hermitize(out);
    out /= out.trace().real();

    const RealVector lam = hermitian_eigenvalues(out);
    if (lam(0) < -1e-8) {
        std::ostringstream os;
        os << "kraus_step: output not PSD, min eigenvalue " << lam(0);
        throw StateInvalidError(os.str(), dt);
    }
    return {std::move(out), rho.layout};
}

Operator superoperator_matrix(const LindbladModel& model) {
    const Eigen::Index d = model.h.rows();
    const Operator id = Operator::Identity(d, d);
    const Complex minus_i(0.0, -1.0);
    // vec(A X B) = (B^T kron A) vec X, columns stacked.
    Operator sup = minus_i * (kron(id, model.h) - kron(model.h.transpose(), id));
    for (const auto& g : model.jumps) {
        const Operator gg = g.adjoint() * g;
        sup += kron(g.conjugate(), g);
        sup -= 0.5 * kron(id, gg);
        sup -= 0.5 * kron(gg.transpose(), id);
    }
    return sup;
}

namespace {

StationaryResult stationary_by_integration(const LindbladModel& model,
                                           const StationaryOptions& opts) {
    const Eigen::Index d = model.h.rows();
    DensityMatrix rho{Operator::Identity(d, d) / static_cast<double>(d), model.layout};
    if (max_abs(lindblad_rhs(model, rho.op)) <= opts.rhs_tol) return {std::move(rho), false};

    const double step = default_step(model, 1.0);
    const long per_chunk = std::lround(1.0 / step);
    double t = 0.0;
    Operator m = rho.op;
    while (t < opts.fallback_horizon) {
        for (long s = 0; s < per_chunk; ++s) m = rk4_step(model, m, step);
        t += 1.0;
        m = hermitize(m);
        m /= m.trace().real();
        if (max_abs(lindblad_rhs(model, m)) <= opts.rhs_tol) {
            return {states::make_density(std::move(m), model.layout), false};
        }
    }
    throw NoConvergenceError("stationary_state: no convergence within the fallback horizon");
}

}  // namespace

StationaryResult stationary_state(const LindbladModel& model, const StationaryOptions& opts) {
    const Eigen::Index d = model.h.rows();
    const Operator sup = superoperator_matrix(model);
    Eigen::JacobiSVD<Operator> svd(sup, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double second_smallest = sv.size() >= 2 ? sv(sv.size() - 2) : 0.0;
    if (second_smallest < opts.degenerate_tol) return stationary_by_integration(model, opts);

    Eigen::VectorXcd v = svd.matrixV().col(sv.size() - 1);
    Operator x = Eigen::Map<Operator>(v.data(), d, d);
    x = hermitize(x);
    const double tr = x.trace().real();
    if (std::abs(tr) < 1e-12) return stationary_by_integration(model, opts);
    x /= tr;

    // Clip rounding-level negative eigenvalues before validation.
    auto eig = hermitian_eig(x);
    Operator rho = Operator::Zero(d, d);
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        const double lam = std::max(eig.values(i), 0.0);
        rho += lam * (eig.vectors.col(i) * eig.vectors.col(i).adjoint());
    }
    rho /= rho.trace().real();
    if (max_abs(lindblad_rhs(model, rho)) > opts.rhs_tol) {
        return stationary_by_integration(model, opts);
    }
    return {states::make_density(std::move(rho), model.layout), true};
}

double entropy_production(const LindbladModel& model, const DensityMatrix& rho,
                          const DensityMatrix& ref) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr double kKernelEig = 1e-10;   // sigma sampling threshold on rho's spectrum
    constexpr double kLeakTol = 1e-9;      // support-stability tolerance on rhs

    const Operator rhs = lindblad_rhs(model, rho.op);
    const auto eig = hermitian_eig(rho.op);

    // Support stability: rhs must not grow mass on rho's kernel, else the
    // instantaneous entropy rate diverges (pure/rank-deficient states).
    std::vector<Eigen::Index> kernel;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        if (eig.values(i) <= kKernelEig) kernel.push_back(i);
    }
    if (!kernel.empty()) {
        Operator vk(rho.dim(), static_cast<Eigen::Index>(kernel.size()));
        for (std::size_t c = 0; c < kernel.size(); ++c) vk.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(kernel[c]);
        if (max_abs(vk.adjoint() * rhs * vk) > kLeakTol) return inf;
    }

    // Support inclusion in the reference state.
    const auto ref_eig = hermitian_eig(ref.op);
    std::vector<Eigen::Index> ref_kernel;
    for (Eigen::Index i = 0; i < ref_eig.values.size(); ++i) {
        if (ref_eig.values(i) <= linalg::kSupportCutoff) ref_kernel.push_back(i);
    }
    if (!ref_kernel.empty()) {
        Operator vk(ref.dim(), static_cast<Eigen::Index>(ref_kernel.size()));
        for (std::size_t c = 0; c < ref_kernel.size(); ++c) vk.col(static_cast<Eigen::Index>(c)) = ref_eig.vectors.col(ref_kernel[c]);
        if (max_abs(vk.adjoint() * rho.op * vk) > states::kSupportMassTol) return inf;
    }

    Operator ln_rho = Operator::Zero(rho.dim(), rho.dim());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        if (eig.values(i) > linalg::kSupportCutoff) {
            ln_rho += std::log(eig.values(i)) * (eig.vectors.col(i) * eig.vectors.col(i).adjoint());
        }
    }
    Operator ln_ref = Operator::Zero(ref.dim(), ref.dim());
    for (Eigen::Index i = 0; i < ref_eig.values.size(); ++i) {
        if (ref_eig.values(i) > linalg::kSupportCutoff) {
            ln_ref += std::log(ref_eig.values(i)) * (ref_eig.vectors.col(i) * ref_eig.vectors.col(i).adjoint());
        }
    }
    double sigma = -(rhs * (ln_rho - ln_ref)).trace().real();
    if (sigma < 0.0 && sigma >= -1e-9) sigma = 0.0;
    return sigma;
}

double entropy_production(const LindbladModel& model, const DensityMatrix& rho) {
    return entropy_production(model, rho, stationary_state(model).state);
}

}  // namespace entroprod::dynamics
