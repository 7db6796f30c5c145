#pragma once

// Integer-order Bessel functions of the first kind and the truncation
// bounds used by every winding-number sum.

#include <vector>

namespace ringdeco {

inline constexpr double kDefaultTruncationTol = 1e-12;

struct BesselOrderRange {
    int min_order = 0;
    int max_order = 0;

    int size() const { return max_order - min_order + 1; }
    void validate() const;
};

/// p_max for a symmetric winding sum p in [-p_max, p_max]. Every Bessel
/// order |nu| > n_sites * p_max - n_sites has |J_nu(x)| <= tail_bound over
/// the requested argument range.
struct WindingTruncation {
    int p_max = 1;
    double tail_bound = 0.0;
};

/// J_n(x) for any integer n and finite real x. Throws ValidationError on
/// non-finite x.
double bessel_j(int n, double x);

/// J_n(x) for every n in range, in one downward-recurrence pass.
std::vector<double> bessel_j_batch(BesselOrderRange range, double x);

/// Same as bessel_j_batch for orders [0, max_order], written into out
/// (resized). Used by hot loops to avoid reallocating.
void bessel_j_nonneg(int max_order, double x, std::vector<double>& out);

/// Smallest p_max whose neglected orders all satisfy |J_nu(x)| < tol for
/// 0 <= x <= max_arg, via |J_nu(x)| <= (x/2)^nu / nu!.
WindingTruncation choose_truncation(double max_arg, int n_sites,
                                    double tol = kDefaultTruncationTol);

/// Smallest order K >= 0 such that the bound (x/2)^nu/nu! < tol for all
/// nu > K. Exposed for the reduced-dynamics truncation.
int bessel_order_cutoff(double max_arg, double tol);

/// log of the uniform bound (x/2)^nu / nu!; -inf at x = 0, nu > 0.
double log_bessel_bound(int nu, double x);

}  // namespace ringdeco
