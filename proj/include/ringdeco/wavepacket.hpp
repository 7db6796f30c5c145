#pragma once

// Two Gaussian wave packets launched towards each other around the ring.

#include <numbers>
#include <vector>

#include "ringdeco/bath.hpp"
#include "ringdeco/reduced.hpp"
#include "ringdeco/ring.hpp"

namespace ringdeco {

struct WavepacketSpec {
    int n_sites = 100;
    double width = 4.0;  // D, in momentum^-2
    int offset = 0;      // centre site of the first packet
    double k_center = std::numbers::pi / 2;
    bool include_second = true;

    void validate() const;
    bool operator==(const WavepacketSpec&) const = default;
};

struct InitialState {
    Eigen::VectorXcd momentum;  // a_n = <k_n|Psi>
    Eigen::VectorXcd sites;     // <j|Psi>

    DensityMatrix density() const { return DensityMatrix::pure(sites); }
};

/// Unnormalised-to-normalised Gaussian weights exp(-(k_n - k_c)^2 D / 2) / Z
/// with k_n in [0, 2 pi).
Eigen::VectorXd packet_weights(const WavepacketSpec& spec);

/// Psi = (psi_1 + psi_2) / sqrt 2, renormalised; psi_1 sits at the offset site
/// with momentum k_center, psi_2 at site 0 with momentum 2 pi - k_center.
InitialState build_state(const WavepacketSpec& spec);

struct WavepacketOptions {
    double tol = kDefaultTruncationTol;
    /// Evolve |Psi><Psi| with the reduced propagator instead of the
    /// momentum-pair sum.
    bool use_propagator = false;
};

double prob_wavepacket_free(const RingConfig& cfg, const WavepacketSpec& spec, int j, double t);
Eigen::VectorXd probs_wavepacket_free(const RingConfig& cfg, const WavepacketSpec& spec, double t);

double prob_wavepacket_decohered(const RingConfig& cfg, const BathSpec& bath, const WavepacketSpec& spec,
                                 int j, double t, const WavepacketOptions& opts = {});
Eigen::VectorXd probs_wavepacket_decohered(const RingConfig& cfg, const BathSpec& bath,
                                           const WavepacketSpec& spec, double t,
                                           const WavepacketOptions& opts = {});

/// Site probabilities for every grid time, OpenMP over times.
std::vector<Eigen::VectorXd> wavepacket_series(const RingConfig& cfg, const BathSpec& bath,
                                               const WavepacketSpec& spec, const TimeGrid& grid,
                                               const WavepacketOptions& opts = {});

namespace serial {
std::vector<Eigen::VectorXd> wavepacket_series(const RingConfig& cfg, const BathSpec& bath,
                                               const WavepacketSpec& spec, const TimeGrid& grid,
                                               const WavepacketOptions& opts = {});
}  // namespace serial

/// v(k) = 2 Delta0 sin(k - Phi/N).
double group_velocity(const RingConfig& cfg, double k);

/// Times in (0, t_max] at which the packet centres coincide modulo N.
std::vector<double> crossing_times(const RingConfig& cfg, const WavepacketSpec& spec, double t_max);

struct RingMoments {
    double centroid = 0.0;  // circular mean position
    double variance = 0.0;  // using shortest signed displacement from the centroid
};
RingMoments ring_moments(const Eigen::VectorXd& probs);

}  // namespace ringdeco
