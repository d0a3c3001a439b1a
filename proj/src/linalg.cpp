#include "entroprod/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace entroprod::linalg {

namespace {

std::vector<Eigen::Index> factor_strides(const FactorLayout& layout) {
    const int n = layout.factors();
    std::vector<Eigen::Index> strides(n, 1);
    for (int f = n - 2; f >= 0; --f) {
        strides[f] = strides[f + 1] * layout.dims[f + 1];
    }
    return strides;
}

}  // namespace

int FactorLayout::total_dim() const {
    int d = 1;
    for (int f : dims) {
        if (f <= 0) throw LayoutMismatchError("FactorLayout: nonpositive factor dimension");
        d *= f;
    }
    return d;
}

void FactorLayout::require_dim(Eigen::Index dim) const {
    if (dims.empty() || total_dim() != dim) {
        std::ostringstream os;
        os << "FactorLayout: product of factor dims " << (dims.empty() ? 0 : total_dim())
           << " does not match operator dim " << dim;
        throw LayoutMismatchError(os.str());
    }
}

Operator identity(int dim) { return Operator::Identity(dim, dim); }

Operator pauli_x() {
    Operator m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Operator pauli_y() {
    Operator m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

Operator pauli_z() {
    Operator m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Operator sigma_plus() {
    Operator m = Operator::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

Operator sigma_minus() {
    Operator m = Operator::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

Ket basis_ket(int dim, int i) {
    Ket v = Ket::Zero(dim);
    v(i) = 1.0;
    return v;
}

Operator projector(const Ket& psi) { return psi * psi.adjoint(); }

Operator kron(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

double max_abs(const Operator& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Operator& a, double tol) {
    return a.rows() == a.cols() && max_abs(a - a.adjoint()) <= tol;
}

Operator hermitize(const Operator& a) { return 0.5 * (a + a.adjoint()); }

EigDecomposition hermitian_eig(const Operator& a) {
    if (a.rows() != a.cols()) throw NonHermitianError("hermitian_eig: matrix not square");
    const double defect = max_abs(a - a.adjoint());
    if (defect > kHermitianTol) {
        std::ostringstream os;
        os << "hermitian_eig: ||a - a^dag||_max = " << defect << " exceeds " << kHermitianTol;
        throw NonHermitianError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Operator> es(hermitize(a));
    if (es.info() != Eigen::Success) throw Error("hermitian_eig: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

RealVector hermitian_eigenvalues(const Operator& a) {
    if (a.rows() != a.cols()) throw NonHermitianError("hermitian_eigenvalues: matrix not square");
    const double defect = max_abs(a - a.adjoint());
    if (defect > kHermitianTol) {
        std::ostringstream os;
        os << "hermitian_eigenvalues: ||a - a^dag||_max = " << defect;
        throw NonHermitianError(os.str());
    }
    const Eigen::Index n = a.rows();
    // Prune rows/columns that are identically zero; each is an exact kernel
    // direction.  Collision-model states carry large exact-zero blocks.
    std::vector<Eigen::Index> live;
    live.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        bool zero = true;
        for (Eigen::Index j = 0; j < n && zero; ++j) {
            if (a(i, j) != 0.0 || a(j, i) != 0.0) zero = false;
        }
        if (!zero) live.push_back(i);
    }
    RealVector out = RealVector::Zero(n);
    if (!live.empty()) {
        Operator sub(static_cast<Eigen::Index>(live.size()), static_cast<Eigen::Index>(live.size()));
        for (std::size_t i = 0; i < live.size(); ++i) {
            for (std::size_t j = 0; j < live.size(); ++j) {
                sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(live[i], live[j]);
            }
        }
        Eigen::SelfAdjointEigenSolver<Operator> es(hermitize(sub), Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw Error("hermitian_eigenvalues: eigensolver failed");
        out.tail(static_cast<Eigen::Index>(live.size())) = es.eigenvalues();
    }
    std::sort(out.data(), out.data() + n);
    return out;
}

Operator matrix_fn_on_support(const Operator& a, const std::function<double(double)>& f,
                              double cutoff) {
    const auto eig = hermitian_eig(a);
    Operator out = Operator::Zero(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        if (eig.values(i) > cutoff) {
            out += f(eig.values(i)) * (eig.vectors.col(i) * eig.vectors.col(i).adjoint());
        }
    }
    return out;
}

Operator partial_trace(const Operator& a, const FactorLayout& layout,
                       const std::vector<int>& keep) {
    layout.require_dim(a.rows());
    if (a.rows() != a.cols()) throw LayoutMismatchError("partial_trace: matrix not square");
    const int nf = layout.factors();
    std::vector<bool> kept(nf, false);
    for (int f : keep) {
        if (f < 0 || f >= nf) throw LayoutMismatchError("partial_trace: keep index out of range");
        kept[f] = true;
    }
    std::vector<int> keep_sorted, traced;
    for (int f = 0; f < nf; ++f) (kept[f] ? keep_sorted : traced).push_back(f);

    const auto strides = factor_strides(layout);
    Eigen::Index dim_keep = 1, dim_traced = 1;
    for (int f : keep_sorted) dim_keep *= layout.dims[f];
    for (int f : traced) dim_traced *= layout.dims[f];

    // Map a compound index over a factor subset to its full-space offset.
    auto offsets = [&](const std::vector<int>& factors, Eigen::Index dim) {
        std::vector<Eigen::Index> off(static_cast<std::size_t>(dim));
        for (Eigen::Index c = 0; c < dim; ++c) {
            Eigen::Index rem = c, o = 0;
            for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
                const Eigen::Index d = layout.dims[*it];
                o += (rem % d) * strides[*it];
                rem /= d;
            }
            off[static_cast<std::size_t>(c)] = o;
        }
        return off;
    };
    const auto keep_off = offsets(keep_sorted, dim_keep);
    const auto tr_off = offsets(traced, dim_traced);

    Operator out = Operator::Zero(dim_keep, dim_keep);
    for (Eigen::Index i = 0; i < dim_keep; ++i) {
        for (Eigen::Index j = 0; j < dim_keep; ++j) {
            Complex s = 0.0;
            for (Eigen::Index t = 0; t < dim_traced; ++t) {
                s += a(keep_off[i] + tr_off[t], keep_off[j] + tr_off[t]);
            }
            out(i, j) = s;
        }
    }
    return out;
}

Operator partial_transpose(const Operator& a, const FactorLayout& layout, int factor) {
    layout.require_dim(a.rows());
    if (a.rows() != a.cols()) throw LayoutMismatchError("partial_transpose: matrix not square");
    if (factor < 0 || factor >= layout.factors()) {
        throw LayoutMismatchError("partial_transpose: factor index out of range");
    }
    const auto strides = factor_strides(layout);
    const Eigen::Index df = layout.dims[factor];
    const Eigen::Index sf = strides[factor];
    const Eigen::Index n = a.rows();

    Operator out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index fi = (i / sf) % df;
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index fj = (j / sf) % df;
            const Eigen::Index ii = i + (fj - fi) * sf;
            const Eigen::Index jj = j + (fi - fj) * sf;
            out(ii, jj) = a(i, j);
        }
    }
    return out;
}

double trace_distance(const Operator& a, const Operator& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimMismatchError("trace_distance: dimension mismatch");
    }
    Operator diff = a - b;
    if (max_abs(diff - diff.adjoint()) > 1e-8) {
        throw NonHermitianError("trace_distance: difference not Hermitian");
    }
    const RealVector lam = hermitian_eigenvalues(hermitize(diff));
    return 0.5 * lam.cwiseAbs().sum();
}

}  // namespace entroprod::linalg
