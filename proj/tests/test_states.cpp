#include <doctest.h>

#include <cmath>

#include "entroprod/states.hpp"

using namespace entroprod;
using linalg::Complex;
using linalg::FactorLayout;
using linalg::Operator;
using states::DensityMatrix;

namespace {

const FactorLayout kOne4{4};
const FactorLayout kTwoQubits{2, 2};

DensityMatrix bell() {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
    psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
    return states::make_density(psi * psi.adjoint(), kTwoQubits);
}

}  // namespace

TEST_CASE("make_density validates and names the violation") {
    CHECK_NOTHROW(states::make_density(linalg::identity(4) / 4.0, kOne4));

    Operator bad_trace = Operator::Zero(2, 2);
    bad_trace(0, 0) = 0.7;
    bad_trace(1, 1) = 0.4;
    CHECK_THROWS_AS(states::make_density(bad_trace, FactorLayout{2}), NonUnitTraceError);

    Operator not_psd = Operator::Zero(2, 2);
    not_psd(0, 0) = 1.2;
    not_psd(1, 1) = -0.2;
    CHECK_THROWS_AS(states::make_density(not_psd, FactorLayout{2}), NotPsdError);

    Operator not_herm = Operator::Zero(2, 2);
    not_herm(0, 0) = 1.0;
    not_herm(0, 1) = 0.1;
    CHECK_THROWS_AS(states::make_density(not_herm, FactorLayout{2}), NonHermitianError);

    try {
        states::make_density(bad_trace, FactorLayout{2});
    } catch (const NonUnitTraceError& e) {
        CHECK(std::string(e.what()).find("0.1") != std::string::npos);
    }
}

TEST_CASE("von Neumann entropy on pure, mixed, and fixed spectra") {
    CHECK(states::von_neumann_entropy(states::random_pure(5, 3)).nats <= 1e-10);
    CHECK(states::von_neumann_entropy(
              states::make_density(0.5 * linalg::identity(2), FactorLayout{2}))
              .nats == doctest::Approx(std::log(2.0)));

    Operator d = Operator::Zero(2, 2);
    d(0, 0) = 0.25;
    d(1, 1) = 0.75;
    // direct scalar evaluation: -0.25 ln 0.25 - 0.75 ln 0.75
    const double expect = -0.25 * std::log(0.25) - 0.75 * std::log(0.75);
    CHECK(expect == doctest::Approx(0.562335).epsilon(1e-5));
    CHECK(states::von_neumann_entropy(states::make_density(d, FactorLayout{2})).nats ==
          doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("relative entropy: zero, infinite, and Bell vs maximally mixed") {
    const auto rho = states::random_mixed(4, 9);
    const auto same = states::relative_entropy(rho, rho);
    CHECK_FALSE(same.infinite);
    CHECK(same.nats <= 1e-10);

    const auto p0 = states::make_density(linalg::projector(linalg::basis_ket(2, 0)), FactorLayout{2});
    const auto p1 = states::make_density(linalg::projector(linalg::basis_ket(2, 1)), FactorLayout{2});
    CHECK(states::relative_entropy(p0, p1).infinite);

    // full-rank state against a rank-deficient reference
    const auto mixed2 = states::random_mixed(2, 31);
    CHECK(states::relative_entropy(mixed2, p0).infinite);
    CHECK_FALSE(states::relative_entropy(p0, mixed2).infinite);

    // pure state vs I/4: tr rho ln rho = 0, -tr rho ln(I/4) = ln 4
    const auto mm = states::make_density(linalg::identity(4) / 4.0, kTwoQubits);
    CHECK(states::relative_entropy(bell(), mm).nats == doctest::Approx(std::log(4.0)).epsilon(1e-10));
}

TEST_CASE("relative entropy is nonnegative on random pairs (Klein)") {
    int finite = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto rho = states::random_mixed(3, 2 * i);
        const auto sig = states::random_mixed(3, 2 * i + 1);
        const auto v = states::relative_entropy(rho, sig);
        if (!v.infinite) {
            ++finite;
            CHECK(v.nats >= 0.0);
        }
    }
    CHECK(finite == 1000);  // random mixed states are full rank
}

TEST_CASE("mutual information: product, Bell, classically correlated") {
    Operator rho_a(2, 2), rho_b(2, 2);
    rho_a << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
    rho_b << 0.4, 0.0, 0.0, 0.6;
    const auto prod = states::make_density(linalg::kron(rho_a, rho_b), kTwoQubits);
    CHECK(states::mutual_information(prod, {0}).nats <= 1e-10);

    CHECK(states::mutual_information(bell(), {0}).nats ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-10));

    Operator cc = Operator::Zero(4, 4);
    cc(0, 0) = 0.5;
    cc(3, 3) = 0.5;
    // direct evaluation: S_A = S_B = ln 2, S_AB = ln 2
    CHECK(states::mutual_information(states::make_density(cc, kTwoQubits), {0}).nats ==
          doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("mutual information equals relative entropy to the marginals") {
    for (int i = 0; i < 50; ++i) {
        const auto rho = states::relabel(states::random_mixed(4, 500 + i), kTwoQubits);
        const Operator ra = linalg::partial_trace(rho.op, rho.layout, {0});
        const Operator rb = linalg::partial_trace(rho.op, rho.layout, {1});
        const auto marg = states::make_density(linalg::kron(ra, rb), kTwoQubits);
        const auto lhs = states::mutual_information(rho, {0});
        const auto rhs = states::relative_entropy(rho, marg);
        REQUIRE_FALSE(rhs.infinite);
        CHECK(std::abs(lhs.nats - rhs.nats) <= 1e-9);
    }
}

TEST_CASE("subadditivity and strong subadditivity on random states") {
    for (int i = 0; i < 100; ++i) {
        const auto rho = states::relabel(states::random_mixed(4, 900 + i), kTwoQubits);
        const double s_ab = states::von_neumann_entropy(rho).nats;
        const double s_a = states::von_neumann_entropy(
            states::make_density(linalg::partial_trace(rho.op, rho.layout, {0}), FactorLayout{2})).nats;
        const double s_b = states::von_neumann_entropy(
            states::make_density(linalg::partial_trace(rho.op, rho.layout, {1}), FactorLayout{2})).nats;
        CHECK(s_ab <= s_a + s_b + 1e-10);
    }
    const FactorLayout three{2, 2, 2};
    for (int i = 0; i < 100; ++i) {
        const auto rho = states::relabel(states::random_mixed(8, 1500 + i), three);
        auto entropy_of = [&](const std::vector<int>& keep) {
            const Operator red = linalg::partial_trace(rho.op, rho.layout, keep);
            double s = 0.0;
            const auto lam = linalg::hermitian_eigenvalues(red);
            for (Eigen::Index k = 0; k < lam.size(); ++k) {
                if (lam(k) > 1e-12) s -= lam(k) * std::log(lam(k));
            }
            return s;
        };
        const double s_abe = states::von_neumann_entropy(rho).nats;
        CHECK(s_abe + entropy_of({1}) <= entropy_of({0, 1}) + entropy_of({1, 2}) + 1e-9);
    }
}

TEST_CASE("thermal states") {
    const Operator z = linalg::pauli_z();
    const auto mm = states::thermal_state(z, 0.0);
    CHECK(linalg::max_abs(mm.op - 0.5 * linalg::identity(2)) <= 1e-14);

    // zero-temperature limit: ground projector |1><1| for H = sigma_z
    const auto cold = states::thermal_state(z, 50.0);
    CHECK(linalg::max_abs(cold.op - linalg::projector(linalg::basis_ket(2, 1))) <= 1e-10);

    // scalar evaluation at beta = 1
    const auto t1 = states::thermal_state(z, 1.0);
    const double zpart = std::exp(1.0) + std::exp(-1.0);
    CHECK(t1.op(0, 0).real() == doctest::Approx(std::exp(-1.0) / zpart).epsilon(1e-12));
    CHECK(t1.op(1, 1).real() == doctest::Approx(std::exp(1.0) / zpart).epsilon(1e-12));
    CHECK(t1.op(0, 0).real() == doctest::Approx(0.11920).epsilon(1e-4));
    CHECK(t1.op(1, 1).real() == doctest::Approx(0.88080).epsilon(1e-4));

    // commutes with H; trace stays one out to beta = 100
    const Operator h = linalg::hermitize(linalg::pauli_x() + 0.3 * linalg::pauli_z());
    for (double beta : {0.5, 10.0, 100.0}) {
        const auto th = states::thermal_state(h, beta);
        CHECK(linalg::max_abs(th.op * h - h * th.op) <= 1e-10);
        CHECK(std::abs(th.op.trace().real() - 1.0) <= 1e-12);
    }
    CHECK_THROWS_AS(states::thermal_state(linalg::sigma_plus(), 1.0), NonHermitianError);
}

TEST_CASE("random states: validity and determinism") {
    const auto pure = states::random_pure(6, 42);
    CHECK(states::von_neumann_entropy(pure).nats <= 1e-10);
    CHECK_NOTHROW(states::make_density(pure.op, FactorLayout{6}));

    const auto mixed = states::random_mixed(6, 42);
    CHECK_NOTHROW(states::make_density(mixed.op, FactorLayout{6}));

    const auto again = states::random_mixed(6, 42);
    CHECK(linalg::max_abs(mixed.op - again.op) == 0.0);  // bit-for-bit
    const auto other = states::random_mixed(6, 43);
    CHECK(linalg::max_abs(mixed.op - other.op) > 1e-3);
}
