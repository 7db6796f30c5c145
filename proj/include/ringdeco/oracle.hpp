#pragma once

// Brute-force references for the winding sums. With symmetric couplings
// every alpha_k sigma_k commutes with H, so each joint eigen-sector of the
// bath sees a free ring at a shifted flux Phi + N sum_k s_k |alpha_k|.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ringdeco/bath.hpp"
#include "ringdeco/ring.hpp"

namespace ringdeco {

inline constexpr int kMaxSectorSpins = 20;
inline constexpr long long kMaxDenseDim = 4096;

struct Sector {
    double effective_flux = 0.0;
    double weight = 0.0;
};

struct SectorDecomposition {
    std::vector<Sector> sectors;
};

/// 2^{N_s} sectors; weights prod_k (1 + s_k m_k) / 2.
SectorDecomposition decompose_sectors(const RingConfig& cfg, const BathSpec& bath);

DensityMatrix evolve_sector_oracle(const RingConfig& cfg, const BathSpec& bath,
                                   const DensityMatrix& rho_in, double t);
/// Sector-averaged bond currents I_{j,j+1}, j = 0..N-1.
Eigen::VectorXd current_sector_oracle(const RingConfig& cfg, const BathSpec& bath,
                                      const DensityMatrix& rho_in, double t);

/// Product initial bath state, one 2x2 density matrix per spin in the
/// basis where the coupling axis is sigma_z.
using BathState = std::vector<Eigen::Matrix2cd>;
/// diag((1 + m_k) / 2, (1 - m_k) / 2) per spin.
BathState product_bath_state(const BathSpec& bath);

struct DenseOracleResult {
    DensityMatrix rho;
    double joint_trace = 0.0;
};

/// Full particle-plus-spins Hamiltonian, exact exponential, bath traced out.
DenseOracleResult evolve_dense_oracle(const RingConfig& cfg, const BathSpec& bath,
                                      const DensityMatrix& rho_in, const BathState& bath_state, double t);

struct GaussianSampleResult {
    DensityMatrix mean;
    Eigen::MatrixXd stderr_re;
    Eigen::MatrixXd stderr_im;
    long long n_samples = 0;
    std::uint64_t seed = 0;
};

/// Monte-Carlo over couplings |alpha_k| drawn with variance lambda / n_spins,
/// each sample evolved exactly by the sector oracle. Bitwise reproducible
/// for a given seed regardless of thread count.
GaussianSampleResult sample_gaussian_ensemble(const RingConfig& cfg, double lambda, int n_spins,
                                              long long n_samples, std::uint64_t seed,
                                              const DensityMatrix& rho_in, double t);

}  // namespace ringdeco
