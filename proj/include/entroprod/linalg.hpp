#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <initializer_list>
#include <vector>

#include "entroprod/errors.hpp"

namespace entroprod::linalg {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kSupportCutoff = 1e-12;

// Ordered tensor-factor dimensions; their product must equal the dimension
// of any operator the layout annotates.
struct FactorLayout {
    std::vector<int> dims;

    FactorLayout() = default;
    FactorLayout(std::initializer_list<int> d) : dims(d) {}
    explicit FactorLayout(std::vector<int> d) : dims(std::move(d)) {}

    int total_dim() const;
    int factors() const { return static_cast<int>(dims.size()); }
    void require_dim(Eigen::Index dim) const;  // throws LayoutMismatch
};

struct EigDecomposition {
    RealVector values;  // ascending
    Operator vectors;   // orthonormal columns, same order
};

// ---------------------------- basic constructors ----------------------------

Operator identity(int dim);
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();
Operator sigma_plus();   // |1><0|
Operator sigma_minus();  // |0><1|
Ket basis_ket(int dim, int i);
Operator projector(const Ket& psi);

// ------------------------------- operations ---------------------------------

// Tensor (Kronecker) product; row-major factor ordering matches FactorLayout.
Operator kron(const Operator& a, const Operator& b);

double max_abs(const Operator& a);
bool is_hermitian(const Operator& a, double tol = kHermitianTol);
Operator hermitize(const Operator& a);

// Full eigendecomposition of a Hermitian operator, eigenvalues ascending.
// Throws NonHermitian when ||a - a^dag||_max exceeds the tolerance.
EigDecomposition hermitian_eig(const Operator& a);

// Eigenvalues only (ascending).  Rows/columns that are exactly zero are
// pruned before the solve; each contributes an exact zero eigenvalue.
RealVector hermitian_eigenvalues(const Operator& a);

// sum f(lambda_i) v_i v_i^dag over eigenvalues above the support cutoff;
// kernel directions map to zero.
Operator matrix_fn_on_support(const Operator& a,
                              const std::function<double(double)>& f,
                              double cutoff = kSupportCutoff);

// Trace out all factors not listed in `keep` (indices into the layout).
Operator partial_trace(const Operator& a, const FactorLayout& layout,
                       const std::vector<int>& keep);

// Transpose the indices of a single factor.
Operator partial_transpose(const Operator& a, const FactorLayout& layout,
                           int factor);

// (1/2) sum |eigenvalues of (a-b)|.
double trace_distance(const Operator& a, const Operator& b);

}  // namespace entroprod::linalg
