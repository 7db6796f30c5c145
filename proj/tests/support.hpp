#pragma once

// Reference implementations that share no code with the library.

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "ringdeco/ring.hpp"

namespace testsupport {

using cplx = std::complex<double>;
using big = boost::multiprecision::cpp_bin_float_100;

/// J_n(x) from the power series in 100-digit arithmetic.
inline double mp_bessel(int n, double x) {
    double sign = 1.0;
    if (n < 0) {
        n = -n;
        if (n % 2) sign = -sign;
    }
    if (x < 0) {
        x = -x;
        if (n % 2) sign = -sign;
    }
    const big half = big(x) / 2;
    const big q = -half * half;
    big term = 1;
    for (int i = 1; i <= n; ++i) term *= half / i;
    big sum = term;
    for (int k = 1; k < 2000; ++k) {
        term *= q / (big(k) * (k + n));
        sum += term;
        if (abs(term) < big("1e-60") && k > x) break;
    }
    return sign * static_cast<double>(sum);
}

/// Hankel asymptotic expansion in long double, accurate for x >> n^2.
inline double hankel_bessel(int n, long double x) {
    const long double mu = 4.0L * n * n;
    long double p = 0, q = 0;
    long double term = 1;
    for (int k = 0; k < 30; ++k) {
        // a_k(n) / x^k with a_k = prod_{i=1..k} (mu - (2i-1)^2) / (k! 8^k)
        if (k > 0) term *= (mu - (2.0L * k - 1) * (2.0L * k - 1)) / (k * 8.0L * x);
        if (k % 2 == 0) {
            p += ((k / 2) % 2 ? -term : term);
        } else {
            q += (((k - 1) / 2) % 2 ? -term : term);
        }
    }
    const long double chi = x - (n / 2.0L + 0.25L) * std::numbers::pi_v<long double>;
    return static_cast<double>(std::sqrt(2.0L / (std::numbers::pi_v<long double> * x)) *
                               (p * std::cos(chi) - q * std::sin(chi)));
}

/// Dense ring Hamiltonian in the site basis.
inline Eigen::MatrixXcd hamiltonian(const ringdeco::RingConfig& cfg) {
    const int n = cfg.n_sites;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    const cplx hop = std::polar(cfg.hop, cfg.flux / n);
    for (int j = 0; j < n; ++j) {
        h(j, (j + 1) % n) += hop;
        h((j + 1) % n, j) += std::conj(hop);
    }
    return h;
}

/// exp(-iHt) by Hermitian eigendecomposition.
inline Eigen::MatrixXcd unitary(const ringdeco::RingConfig& cfg, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian(cfg));
    Eigen::VectorXcd phase(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phase.size(); ++i) phase(i) = std::polar(1.0, -es.eigenvalues()(i) * t);
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

inline Eigen::MatrixXcd evolve_exact(const ringdeco::RingConfig& cfg, const Eigen::MatrixXcd& rho, double t) {
    const Eigen::MatrixXcd u = unitary(cfg, t);
    return u * rho * u.adjoint();
}

inline Eigen::VectorXcd random_state(int n, unsigned seed) {
    std::srand(seed);
    Eigen::VectorXcd v = Eigen::VectorXcd::Random(n);
    return v / v.norm();
}

inline double max_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testsupport
