#include "doctest.h"
#include "ringdeco/density.hpp"
#include "ringdeco/error.hpp"
#include "support.hpp"

using namespace ringdeco;

TEST_SUITE("density") {
    TEST_CASE("site and pure states satisfy the invariants") {
        const DensityMatrix s = DensityMatrix::site(4, 2);
        CHECK(s.dim() == 4);
        CHECK(s.probability(2) == 1.0);
        const DensityMatrix p = DensityMatrix::pure(testsupport::random_state(5, 3) * 7.0);
        const DensityDiagnostics d = diagnose(p);
        CHECK(d.trace_error < 1e-14);
        CHECK(d.hermiticity_error < 1e-15);
        CHECK(d.min_eigenvalue > -1e-14);
    }

    TEST_CASE("invalid matrices are rejected") {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(3, 3) / 3.0;
        CHECK_NOTHROW(DensityMatrix::from_matrix(m));
        Eigen::MatrixXcd bad_trace = m * 2.0;
        CHECK_THROWS_AS(DensityMatrix::from_matrix(bad_trace), ValidationError);
        Eigen::MatrixXcd non_herm = m;
        non_herm(0, 1) = cplx(0.0, 0.1);
        CHECK_THROWS_AS(DensityMatrix::from_matrix(non_herm), ValidationError);
        Eigen::MatrixXcd negative = Eigen::MatrixXcd::Zero(2, 2);
        negative(0, 0) = 1.5;
        negative(1, 1) = -0.5;
        CHECK_THROWS_AS(DensityMatrix::from_matrix(negative), ValidationError);
        CHECK_THROWS_AS(DensityMatrix::from_matrix(Eigen::MatrixXcd::Zero(2, 3)), ValidationError);
        CHECK_THROWS_AS(DensityMatrix::site(3, 3), IndexError);
        CHECK_THROWS_AS(DensityMatrix::pure(Eigen::VectorXcd::Zero(3)), ValidationError);
    }

    TEST_CASE("momentum occupations of a momentum eigenstate") {
        const int n = 6;
        const Eigen::MatrixXcd f = momentum_basis(n);
        CHECK(testsupport::max_diff(f.adjoint() * f, Eigen::MatrixXcd::Identity(n, n)) < 1e-14);
        const DensityMatrix k2 = DensityMatrix::pure(f.col(2));
        const Eigen::VectorXd occ = momentum_occupations(k2);
        for (int m = 0; m < n; ++m) CHECK(std::abs(occ(m) - (m == 2 ? 1.0 : 0.0)) < 1e-14);
        // <j|k> = e^{-i k j} / sqrt(N)
        CHECK(std::abs(f(1, 2) - std::polar(1.0 / std::sqrt(6.0), -2.0 * std::numbers::pi * 2 / 6)) < 1e-15);
    }

    TEST_CASE("a localised site has flat momentum occupations") {
        const Eigen::VectorXd occ = momentum_occupations(DensityMatrix::site(5, 3));
        for (int m = 0; m < 5; ++m) CHECK(std::abs(occ(m) - 0.2) < 1e-15);
    }
}
