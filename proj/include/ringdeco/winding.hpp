#pragma once

// Shared winding-sum kernels behind the free and bath-averaged propagators.
// A pair of paths with windings (p, p') and net displacements (c, c')
// carries the phase difference w = N (p' - p) + c' - c; `weight(w)` is the
// factor the bath attaches to that pair (1 for the free ring).

#include <functional>

#include "ringdeco/ring.hpp"

namespace ringdeco::winding {

using Weight = std::function<cplx(int w)>;

/// Naive double sum over (p, p') in [-p_max, p_max]^2.
Eigen::MatrixXcd double_sum_table(const RingConfig& cfg, double t, int p_max, const Weight& weight);

/// Graf-collapsed single sum: the p sum at fixed w is done in closed form,
/// leaving a sum over |w| <= w_max of J_w(4 Delta0 t sin(k_m/2)) terms.
Eigen::MatrixXcd single_sum_table(const RingConfig& cfg, double t, int w_max, const Weight& weight);

/// Largest |w| that can carry a Bessel factor above tol at time t.
int single_sum_cutoff(const RingConfig& cfg, double t, double tol);

}  // namespace ringdeco::winding
