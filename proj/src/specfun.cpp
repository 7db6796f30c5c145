#include "ringdeco/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ringdeco/error.hpp"

namespace ringdeco {
namespace {

constexpr double kSeriesLimit = 2.0;
constexpr double kRescaleAbove = 1e250;
constexpr double kRescaleBy = 1e-250;

void require_finite(double x) {
    if (!std::isfinite(x)) {
        throw ValidationError("bessel_j: argument must be finite");
    }
}

// Starting order for Miller's downward recurrence. The sqrt term is the
// classic Numerical Recipes margin; the floor keeps small arguments safe.
int miller_start(int nmax, double ax) {
    const int m0 = std::max(nmax, static_cast<int>(std::ceil(ax)));
    int m = m0 + 20 + static_cast<int>(std::sqrt(60.0 * m0));
    return m + (m & 1);
}

// J_n(ax) for n = 0..nmax by power series, ax >= 0 small.
void series_nonneg(int nmax, double ax, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(nmax) + 1, 0.0);
    const double half = 0.5 * ax;
    const double q = -half * half;
    double lead = 1.0;  // (x/2)^n / n!
    for (int n = 0; n <= nmax; ++n) {
        if (n > 0) lead *= half / n;
        if (lead == 0.0) break;
        double term = lead;
        double sum = lead;
        for (int k = 1; k < 200; ++k) {
            term *= q / (static_cast<double>(k) * (k + n));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        out[static_cast<std::size_t>(n)] = sum;
    }
}

double series_single(int n, double ax) {
    const double half = 0.5 * ax;
    double lead = 1.0;
    for (int i = 1; i <= n; ++i) {
        lead *= half / i;
        if (lead == 0.0) return 0.0;
    }
    const double q = -half * half;
    double term = lead;
    double sum = lead;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * (k + n));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Miller's algorithm, normalised by J_0 + 2 sum_k J_2k = 1.
void miller_nonneg(int nmax, double ax, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(nmax) + 1, 0.0);
    const int start = miller_start(nmax, ax);
    const double two_over_x = 2.0 / ax;
    double above = 0.0;  // unnormalised J_{k+1}
    double cur = 1e-30;  // unnormalised J_k
    double norm = 0.0;
    for (int k = start; k >= 1; --k) {
        const double below = k * two_over_x * cur - above;  // J_{k-1}
        above = cur;
        cur = below;
        const int order = k - 1;
        if (order <= nmax) out[static_cast<std::size_t>(order)] = cur;
        if ((order & 1) == 0) norm += (order == 0 ? 1.0 : 2.0) * cur;
        if (std::abs(cur) > kRescaleAbove) {
            cur *= kRescaleBy;
            above *= kRescaleBy;
            norm *= kRescaleBy;
            const int hi = std::min(nmax, start);
            for (int i = order; i <= hi; ++i) out[static_cast<std::size_t>(i)] *= kRescaleBy;
        }
    }
    const double inv = 1.0 / norm;
    for (double& v : out) v *= inv;
}

double miller_single(int n, double ax) {
    const int start = miller_start(n, ax);
    const double two_over_x = 2.0 / ax;
    double above = 0.0;
    double cur = 1e-30;
    double norm = 0.0;
    double wanted = 0.0;
    for (int k = start; k >= 1; --k) {
        const double below = k * two_over_x * cur - above;
        above = cur;
        cur = below;
        const int order = k - 1;
        if (order == n) wanted = cur;
        if ((order & 1) == 0) norm += (order == 0 ? 1.0 : 2.0) * cur;
        if (std::abs(cur) > kRescaleAbove) {
            cur *= kRescaleBy;
            above *= kRescaleBy;
            norm *= kRescaleBy;
            if (order <= n) wanted *= kRescaleBy;
        }
    }
    return wanted / norm;
}

inline double parity(int n) { return (n & 1) ? -1.0 : 1.0; }

}  // namespace

void BesselOrderRange::validate() const {
    if (min_order > max_order) {
        throw ValidationError("BesselOrderRange: min_order " + std::to_string(min_order) +
                              " exceeds max_order " + std::to_string(max_order));
    }
}

double bessel_j(int n, double x) {
    require_finite(x);
    // J_{-n}(x) = (-1)^n J_n(x), J_n(-x) = (-1)^n J_n(x)
    double sign = 1.0;
    if (n < 0) {
        n = -n;
        sign *= parity(n);
    }
    if (x < 0.0) {
        x = -x;
        sign *= parity(n);
    }
    if (x == 0.0) return n == 0 ? sign : 0.0;
    if (x < kSeriesLimit) return sign * series_single(n, x);
    return sign * miller_single(n, x);
}

void bessel_j_nonneg(int max_order, double x, std::vector<double>& out) {
    require_finite(x);
    if (max_order < 0) throw ValidationError("bessel_j_nonneg: max_order must be >= 0");
    const double ax = std::abs(x);
    if (ax == 0.0) {
        out.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
        out[0] = 1.0;
        return;
    }
    if (ax < kSeriesLimit) {
        series_nonneg(max_order, ax, out);
    } else {
        miller_nonneg(max_order, ax, out);
    }
    if (x < 0.0) {
        for (std::size_t n = 1; n < out.size(); n += 2) out[n] = -out[n];
    }
}

std::vector<double> bessel_j_batch(BesselOrderRange range, double x) {
    range.validate();
    require_finite(x);
    const int reach = std::max(std::abs(range.min_order), std::abs(range.max_order));
    std::vector<double> nonneg;
    bessel_j_nonneg(reach, x, nonneg);
    std::vector<double> out(static_cast<std::size_t>(range.size()));
    for (int n = range.min_order; n <= range.max_order; ++n) {
        const double v = nonneg[static_cast<std::size_t>(std::abs(n))];
        out[static_cast<std::size_t>(n - range.min_order)] = n < 0 ? parity(n) * v : v;
    }
    return out;
}

double log_bessel_bound(int nu, double x) {
    if (nu < 0) nu = -nu;
    x = std::abs(x);
    if (nu == 0) return 0.0;
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    return nu * std::log(0.5 * x) - std::lgamma(nu + 1.0);
}

int bessel_order_cutoff(double max_arg, double tol) {
    if (!std::isfinite(max_arg) || max_arg < 0.0) {
        throw ValidationError("bessel_order_cutoff: max_arg must be finite and >= 0");
    }
    if (!(tol > 0.0) || !(tol < 1.0)) {
        throw ValidationError("bessel_order_cutoff: tol must lie in (0, 1)");
    }
    const double log_tol = std::log(tol);
    int k = static_cast<int>(std::ceil(0.5 * max_arg));
    while (log_bessel_bound(k + 1, max_arg) >= log_tol) {
        ++k;
        if (k > 100000000) throw NumericalGuardError("bessel_order_cutoff: order bound overflow");
    }
    return k;
}

WindingTruncation choose_truncation(double max_arg, int n_sites, double tol) {
    if (n_sites < 1) throw ValidationError("choose_truncation: n_sites must be >= 1");
    const int cutoff = bessel_order_cutoff(max_arg, tol);
    WindingTruncation tr;
    tr.p_max = (cutoff + n_sites - 1) / n_sites + 1;
    const int first_neglected = n_sites * tr.p_max - n_sites + 1;
    tr.tail_bound = std::exp(log_bessel_bound(first_neglected, max_arg));
    if (tr.tail_bound == 0.0) tr.tail_bound = std::numeric_limits<double>::denorm_min();
    return tr;
}

}  // namespace ringdeco
