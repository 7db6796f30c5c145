#pragma once

// Bath-free dynamics on the symmetric N-site ring with hopping Delta0 and
// Aharonov-Bohm flux Phi. Conventions (hbar = 1):
//   H = sum_j Delta0 e^{i Phi/N} |j><j+1| + h.c.
//   <j|k_n> = e^{-i k_n j} / sqrt(N),  k_n = 2 pi n / N
//   eps_n   = 2 Delta0 cos(k_n - Phi/N)

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ringdeco/density.hpp"
#include "ringdeco/specfun.hpp"

namespace ringdeco {

struct RingConfig {
    int n_sites = 3;
    double hop = 1.0;
    double flux = 0.0;

    void validate() const;
    double link_phase() const { return flux / n_sites; }
    double momentum(int n) const;
    bool operator==(const RingConfig&) const = default;
};

struct TimeGrid {
    std::vector<double> times;

    /// n_steps + 1 equally spaced points on [0, t_max].
    static TimeGrid uniform(double t_max, int n_steps);
    void validate() const;
    std::size_t size() const { return times.size(); }
};

enum class SumForm { kDouble, kSingle, kAuto };

SumForm parse_sum_form(std::string_view text);
std::string_view to_string(SumForm form);
/// kAuto becomes kSingle when n_sites * p_max > 32.
SumForm resolve_sum_form(SumForm form, int n_sites, int p_max);

inline constexpr int kAutoSingleThreshold = 32;

/// Density-matrix propagator of a translation-invariant ring,
///   K_{jj',ll'} = table((j - l) mod N, (j' - l') mod N).
/// Both the free and the bath-averaged propagators have this shape.
class Propagator {
public:
    Propagator() = default;
    explicit Propagator(Eigen::MatrixXcd table) : table_(std::move(table)) {}

    static Propagator identity(int n_sites);

    int n_sites() const { return static_cast<int>(table_.rows()); }
    const Eigen::MatrixXcd& table() const { return table_; }
    cplx operator()(int j, int jp, int l, int lp) const;

    /// rho_out_{jj'} = sum_{ll'} K_{jj',ll'} rho_in_{ll'}; OpenMP over rows.
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho_in) const;
    /// Single-threaded reference for apply().
    Eigen::MatrixXcd apply_serial(const Eigen::MatrixXcd& rho_in) const;

private:
    Eigen::MatrixXcd table_;
};

double dispersion(const RingConfig& cfg, int n);

/// G_{jj'}(t) from the O(N) spectral sum (production path).
cplx green_free(const RingConfig& cfg, int j, int jp, double t);
/// G_{jj'}(t) from the winding-number Bessel sum (cross-check).
cplx green_free_winding(const RingConfig& cfg, int j, int jp, double t,
                        double tol = kDefaultTruncationTol);
/// g_c = G_{c,0}(t), c = 0..N-1. The ring is translation invariant so
/// G_{jl} = g_{(j-l) mod N}.
Eigen::VectorXcd green_column(const RingConfig& cfg, double t);

/// Truncation of the free double winding sum, Bessel argument 2 Delta0 t.
WindingTruncation free_truncation(const RingConfig& cfg, double t,
                                  double tol = kDefaultTruncationTol);

Propagator propagator_free(const RingConfig& cfg, double t, SumForm form = SumForm::kAuto,
                           double tol = kDefaultTruncationTol);

/// |G_{j0}(t)|^2, particle starting on site 0.
double prob_free(const RingConfig& cfg, int j, double t);

/// Bond current I_{j,j+1} = 2 Im[Delta0 e^{-i Phi/N} rho_{j,j+1}].
double current_free(const RingConfig& cfg, const DensityMatrix& rho, int j);
double bond_current(const RingConfig& cfg, const Eigen::MatrixXcd& rho, int j);

/// rho(t) for every grid time through the winding-sum propagator.
/// Times are distributed over OpenMP threads.
std::vector<DensityMatrix> density_free(const RingConfig& cfg, const DensityMatrix& rho_in,
                                        const TimeGrid& grid, SumForm form = SumForm::kAuto,
                                        double tol = kDefaultTruncationTol);

/// U rho U^dagger with U from the momentum eigenbasis. Used by the oracles,
/// which override the flux per bath sector.
Eigen::MatrixXcd evolve_unitary_free(const RingConfig& cfg, const Eigen::MatrixXcd& rho_in,
                                     double t);

namespace serial {
std::vector<DensityMatrix> density_free(const RingConfig& cfg, const DensityMatrix& rho_in,
                                        const TimeGrid& grid, SumForm form = SumForm::kAuto,
                                        double tol = kDefaultTruncationTol);
}  // namespace serial

void require_site(const RingConfig& cfg, int j, const char* what);
void require_time(double t);
void require_dim(const RingConfig& cfg, const Eigen::MatrixXcd& rho);

inline int wrap_site(long long j, int n) {
    const long long r = j % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

}  // namespace ringdeco
