#include "ringdeco/density.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ringdeco/error.hpp"

namespace ringdeco {

DensityMatrix DensityMatrix::from_matrix(Eigen::MatrixXcd m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw ValidationError("density matrix must be square and non-empty");
    }
    if (!m.allFinite()) throw ValidationError("density matrix has non-finite entries");
    const DensityDiagnostics d = diagnose(m);
    if (d.hermiticity_error > kHermiticityTol) {
        throw ValidationError("density matrix is not Hermitian (deviation " +
                              std::to_string(d.hermiticity_error) + ")");
    }
    if (d.trace_error > kTraceTol) {
        throw ValidationError("density matrix trace differs from 1 by " +
                              std::to_string(d.trace_error));
    }
    if (d.min_eigenvalue < kPositivityTol) {
        throw ValidationError("density matrix has negative eigenvalue " +
                              std::to_string(d.min_eigenvalue));
    }
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::unchecked(Eigen::MatrixXcd m) { return DensityMatrix(std::move(m)); }

DensityMatrix DensityMatrix::site(int n_sites, int j) {
    if (n_sites < 1) throw ValidationError("site state needs n_sites >= 1");
    if (j < 0 || j >= n_sites) {
        throw IndexError("site " + std::to_string(j) + " outside ring of " +
                         std::to_string(n_sites) + " sites");
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n_sites, n_sites);
    m(j, j) = 1.0;
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
    const double norm = psi.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw ValidationError("pure state needs a finite non-zero vector");
    }
    const Eigen::VectorXcd v = psi / norm;
    return DensityMatrix(v * v.adjoint());
}

DensityDiagnostics diagnose(const Eigen::MatrixXcd& m) {
    DensityDiagnostics d;
    d.trace_error = std::abs(m.trace() - cplx(1.0, 0.0));
    d.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
    const Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    return d;
}

Eigen::MatrixXcd momentum_basis(int n_sites) {
    Eigen::MatrixXcd f(n_sites, n_sites);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_sites));
    for (int j = 0; j < n_sites; ++j) {
        for (int n = 0; n < n_sites; ++n) {
            // reduce j*n mod N so the phase stays exact for large rings
            const double k = 2.0 * std::numbers::pi * ((j * n) % n_sites) / n_sites;
            f(j, n) = std::polar(scale, -k);
        }
    }
    return f;
}

Eigen::VectorXd momentum_occupations(const DensityMatrix& rho) {
    const Eigen::MatrixXcd f = momentum_basis(rho.dim());
    const Eigen::MatrixXcd rk = f.adjoint() * rho.matrix() * f;
    return rk.diagonal().real();
}

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace ringdeco
