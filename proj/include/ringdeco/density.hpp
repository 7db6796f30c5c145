#pragma once

#include <complex>

#include <Eigen/Dense>

namespace ringdeco {

using cplx = std::complex<double>;

/// N x N reduced density matrix of the ring particle in the site basis.
/// Immutable once built.
class DensityMatrix {
public:
    static constexpr double kHermiticityTol = 1e-12;
    static constexpr double kTraceTol = 1e-12;
    static constexpr double kPositivityTol = -1e-10;

    DensityMatrix() = default;

    /// Validates hermiticity, unit trace and positivity; throws ValidationError.
    static DensityMatrix from_matrix(Eigen::MatrixXcd m);
    /// No checks; for kernel outputs whose invariants are verified separately.
    static DensityMatrix unchecked(Eigen::MatrixXcd m);
    /// |j><j| on an n-site ring.
    static DensityMatrix site(int n_sites, int j);
    /// |psi><psi|; psi is normalised first (throws on zero vector).
    static DensityMatrix pure(const Eigen::VectorXcd& psi);

    int dim() const { return static_cast<int>(m_.rows()); }
    cplx operator()(int j, int jp) const { return m_(j, jp); }
    const Eigen::MatrixXcd& matrix() const { return m_; }

    double probability(int j) const { return m_(j, j).real(); }
    Eigen::VectorXd diagonal() const { return m_.diagonal().real(); }

private:
    explicit DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {}
    Eigen::MatrixXcd m_;
};

struct DensityDiagnostics {
    double trace_error = 0.0;       // |tr rho - 1|
    double hermiticity_error = 0.0; // max |rho - rho^dagger|
    double min_eigenvalue = 0.0;
};

DensityDiagnostics diagnose(const Eigen::MatrixXcd& m);
inline DensityDiagnostics diagnose(const DensityMatrix& rho) { return diagnose(rho.matrix()); }

/// <k_n|rho|k_n> for n = 0..N-1 with <j|k_n> = e^{-i k_n j}/sqrt(N).
Eigen::VectorXd momentum_occupations(const DensityMatrix& rho);

/// Site-to-momentum unitary, column n = |k_n> in the site basis.
Eigen::MatrixXcd momentum_basis(int n_sites);

/// max elementwise |a - b|
double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace ringdeco
