#pragma once

// Decohered ring dynamics with the spin bath traced out.

#include <vector>

#include "ringdeco/bath.hpp"
#include "ringdeco/ring.hpp"

namespace ringdeco {

struct ReducedOptions {
    double tol = kDefaultTruncationTol;
    /// Evaluate the naive O(p_max^2) double winding sum instead of the
    /// collapsed single sum. Kept for validation.
    bool naive_double_sum = false;
    /// Evaluate the influence at w + shift. The bond current needs -1
    /// because the current operator itself carries one bath phase.
    int influence_shift = 0;
    /// Test-only canary: negate F(w) for w < 0, breaking F(-w) = conj F(w).
    bool mutate_influence = false;
};

struct ReducedPropagator {
    Propagator kernel;
    BathSpec bath;
    WindingTruncation truncation;
    int w_max = 0;  // largest |w| kept in the collapsed sum

    int n_sites() const { return kernel.n_sites(); }
    cplx operator()(int j, int jp, int l, int lp) const { return kernel(j, jp, l, lp); }
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const { return kernel.apply(rho); }
};

ReducedPropagator propagator_reduced(const RingConfig& cfg, const BathSpec& bath, double t,
                                     const ReducedOptions& opts = {});

std::vector<DensityMatrix> density_reduced(const RingConfig& cfg, const BathSpec& bath,
                                           const DensityMatrix& rho_in, const TimeGrid& grid,
                                           const ReducedOptions& opts = {});

/// Particle starting on site 0; only the mu = 0 influence values enter.
double prob_reduced(const RingConfig& cfg, const BathSpec& bath, int j, double t,
                    double tol = kDefaultTruncationTol);

struct AsymptoticResult {
    double value = 0.0;
    double amplitude = 0.0;
    /// 2 sqrt(3) Delta0 t >= (6 p_max)^2 with p_max = sqrt(5 / (9 lambda))
    bool precondition_ok = false;
};

/// Long-time return probability of the 3-site ring,
/// (1/3)[1 + 2A cos(2 sqrt3 Delta0 t - pi/4) / sqrt(pi sqrt3 Delta0 t)].
AsymptoticResult prob_asymptotic_n3(const RingConfig& cfg, const BathSpec& bath, double t,
                                    double tol = kDefaultTruncationTol);
/// A = 1 + 2 sum_{p>=1} (-1)^p Re[e^{2ip Phi} F(6p)].
double asymptotic_amplitude_n3(const BathSpec& bath, double flux, double tol = kDefaultTruncationTol);

/// Bond current I_{j,j+1}(t) averaged over the bath.
double current_reduced(const RingConfig& cfg, const BathSpec& bath, const DensityMatrix& rho_in,
                       int j, double t, const ReducedOptions& opts = {});
/// All N bond currents at time t.
Eigen::VectorXd currents_reduced(const RingConfig& cfg, const BathSpec& bath,
                                 const DensityMatrix& rho_in, double t, const ReducedOptions& opts = {});

namespace serial {
std::vector<DensityMatrix> density_reduced(const RingConfig& cfg, const BathSpec& bath,
                                           const DensityMatrix& rho_in, const TimeGrid& grid,
                                           const ReducedOptions& opts = {});
}  // namespace serial

}  // namespace ringdeco
