#include "ringdeco/oracle.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ringdeco/error.hpp"
#include "ringdeco/expm.hpp"

namespace ringdeco {
namespace {

const FixedCouplings& fixed_or_throw(const BathSpec& bath, const char* who) {
    const auto* f = std::get_if<FixedCouplings>(&bath.model);
    if (f == nullptr) throw TypeError(std::string(who) + " needs a FixedCouplings bath");
    return *f;
}

void check_spin_count(std::size_t n_spins) {
    if (n_spins > static_cast<std::size_t>(kMaxSectorSpins)) {
        throw NumericalGuardError("sector oracle limited to " + std::to_string(kMaxSectorSpins) +
                                  " spins, got " + std::to_string(n_spins));
    }
}

RingConfig with_flux(RingConfig cfg, double flux) {
    cfg.flux = flux;
    return cfg;
}

constexpr long long kSampleChunk = 1000;

}  // namespace

SectorDecomposition decompose_sectors(const RingConfig& cfg, const BathSpec& bath) {
    cfg.validate();
    bath.validate();
    const FixedCouplings& f = fixed_or_throw(bath, "decompose_sectors");
    check_spin_count(f.alphas.size());
    const std::size_t ns = f.alphas.size();
    const std::size_t count = std::size_t{1} << ns;
    SectorDecomposition out;
    out.sectors.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
        double shift = 0.0;
        double weight = 1.0;
        for (std::size_t k = 0; k < ns; ++k) {
            const double s = ((mask >> k) & 1U) ? -1.0 : 1.0;
            shift += s * std::abs(f.alphas[k]);
            weight *= 0.5 * (1.0 + s * f.polarization(k));
        }
        out.sectors.push_back({cfg.flux + cfg.n_sites * shift, weight});
    }
    return out;
}

DensityMatrix evolve_sector_oracle(const RingConfig& cfg, const BathSpec& bath,
                                   const DensityMatrix& rho_in, double t) {
    require_dim(cfg, rho_in.matrix());
    require_time(t);
    const SectorDecomposition dec = decompose_sectors(cfg, bath);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(cfg.n_sites, cfg.n_sites);
    for (const Sector& s : dec.sectors) {
        if (s.weight == 0.0) continue;
        acc += s.weight * evolve_unitary_free(with_flux(cfg, s.effective_flux), rho_in.matrix(), t);
    }
    return DensityMatrix::unchecked(std::move(acc));
}

Eigen::VectorXd current_sector_oracle(const RingConfig& cfg, const BathSpec& bath,
                                      const DensityMatrix& rho_in, double t) {
    require_dim(cfg, rho_in.matrix());
    require_time(t);
    const SectorDecomposition dec = decompose_sectors(cfg, bath);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(cfg.n_sites);
    for (const Sector& s : dec.sectors) {
        if (s.weight == 0.0) continue;
        const RingConfig sector_cfg = with_flux(cfg, s.effective_flux);
        const Eigen::MatrixXcd rho = evolve_unitary_free(sector_cfg, rho_in.matrix(), t);
        for (int j = 0; j < cfg.n_sites; ++j) out(j) += s.weight * bond_current(sector_cfg, rho, j);
    }
    return out;
}

BathState product_bath_state(const BathSpec& bath) {
    const FixedCouplings& f = fixed_or_throw(bath, "product_bath_state");
    BathState out;
    for (std::size_t k = 0; k < f.alphas.size(); ++k) {
        const double m = f.polarization(k);
        Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
        r(0, 0) = 0.5 * (1.0 + m);
        r(1, 1) = 0.5 * (1.0 - m);
        out.push_back(r);
    }
    return out;
}

DenseOracleResult evolve_dense_oracle(const RingConfig& cfg, const BathSpec& bath,
                                      const DensityMatrix& rho_in, const BathState& bath_state, double t) {
    cfg.validate();
    bath.validate();
    require_dim(cfg, rho_in.matrix());
    require_time(t);
    const FixedCouplings& f = fixed_or_throw(bath, "evolve_dense_oracle");
    const std::size_t ns = f.alphas.size();
    if (bath_state.size() != ns) throw ValidationError("bath state needs one 2x2 matrix per spin");
    if (ns > 30) throw NumericalGuardError("dense oracle: too many spins");
    const long long bath_dim = 1LL << ns;
    const long long dim = cfg.n_sites * bath_dim;
    if (dim > kMaxDenseDim) {
        throw NumericalGuardError("dense oracle dimension " + std::to_string(dim) + " exceeds " +
                                  std::to_string(kMaxDenseDim));
    }
    const int n = cfg.n_sites;
    const auto bd = static_cast<Eigen::Index>(bath_dim);

    // hop j -> j+1 carries e^{i Phi/N} prod_k e^{i alpha_k sigma_z^k}; the
    // bath factor is diagonal, entry b has sigma_z^k = +1 where bit k is 0
    Eigen::VectorXcd bath_phase(bd);
    for (Eigen::Index b = 0; b < bd; ++b) {
        double phase = 0.0;
        for (std::size_t k = 0; k < ns; ++k) phase += (((b >> k) & 1) ? -1.0 : 1.0) * std::abs(f.alphas[k]);
        bath_phase(b) = std::polar(cfg.hop, cfg.link_phase() + phase);
    }
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (int j = 0; j < n; ++j) {
        const int next = wrap_site(j + 1, n);
        for (Eigen::Index b = 0; b < bd; ++b) {
            const Eigen::Index row = j * bd + b;
            const Eigen::Index col = next * bd + b;
            h(row, col) += bath_phase(b);
            h(col, row) += std::conj(bath_phase(b));
        }
    }

    // bath density as a Kronecker product; spin k is bit k (least significant first)
    Eigen::MatrixXcd rho_b = Eigen::MatrixXcd::Ones(1, 1);
    for (std::size_t k = 0; k < ns; ++k) {
        const Eigen::MatrixXcd prev = rho_b;
        const Eigen::Index pd = prev.rows();
        rho_b.resize(2 * pd, 2 * pd);
        for (int s = 0; s < 2; ++s) {
            for (int sp = 0; sp < 2; ++sp) rho_b.block(s * pd, sp * pd, pd, pd) = bath_state[k](s, sp) * prev;
        }
    }
    Eigen::MatrixXcd joint(dim, dim);
    for (int j = 0; j < n; ++j) {
        for (int jp = 0; jp < n; ++jp) joint.block(j * bd, jp * bd, bd, bd) = rho_in(j, jp) * rho_b;
    }

    const Eigen::MatrixXcd u = expm(cplx(0.0, -t) * h);
    const Eigen::MatrixXcd evolved = u * joint * u.adjoint();

    Eigen::MatrixXcd reduced(n, n);
    for (int j = 0; j < n; ++j) {
        for (int jp = 0; jp < n; ++jp) reduced(j, jp) = evolved.block(j * bd, jp * bd, bd, bd).trace();
    }
    DenseOracleResult out{DensityMatrix::unchecked(reduced), evolved.trace().real()};
    return out;
}

GaussianSampleResult sample_gaussian_ensemble(const RingConfig& cfg, double lambda, int n_spins,
                                              long long n_samples, std::uint64_t seed,
                                              const DensityMatrix& rho_in, double t) {
    cfg.validate();
    require_dim(cfg, rho_in.matrix());
    require_time(t);
    if (n_samples < 1) throw ValidationError("n_samples must be >= 1");
    if (!std::isfinite(lambda) || lambda < 0.0) throw ValidationError("lambda must be finite and >= 0");
    if (n_spins < 0) throw ValidationError("n_spins must be >= 0");
    check_spin_count(static_cast<std::size_t>(n_spins));

    const int n = cfg.n_sites;
    const Eigen::MatrixXcd basis = momentum_basis(n);
    const Eigen::MatrixXcd rho_k = basis.adjoint() * rho_in.matrix() * basis;
    const double sigma = n_spins > 0 ? std::sqrt(lambda / n_spins) : 0.0;
    const std::size_t n_sectors = std::size_t{1} << n_spins;
    const double sector_weight = 1.0 / static_cast<double>(n_sectors);

    // one exact sector average for sample i; the RNG stream depends only on (seed, i)
    const auto sample = [&](long long i, std::vector<double>& alphas, Eigen::VectorXcd& phases, Eigen::MatrixXcd& avg) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double& a : alphas) a = std::abs(sigma * normal(rng));

        avg.setZero();
        for (std::size_t mask = 0; mask < n_sectors; ++mask) {
            double shift = 0.0;
            for (int k = 0; k < n_spins; ++k) {
                const double a = alphas[static_cast<std::size_t>(k)];
                shift += ((mask >> k) & 1U) ? -a : a;
            }
            const double theta = cfg.link_phase() + shift;
            for (int m = 0; m < n; ++m) phases(m) = std::polar(1.0, -2.0 * cfg.hop * std::cos(cfg.momentum(m) - theta) * t);
            avg.noalias() += phases * phases.adjoint();
        }
        const Eigen::MatrixXcd evolved_k = rho_k.cwiseProduct(avg) * sector_weight;
        return Eigen::MatrixXcd(basis * evolved_k * basis.adjoint());
    };

    // Moments are accumulated about the first sample so that a zero-variance
    // ensemble reports exactly zero spread.
    Eigen::MatrixXcd reference;
    {
        std::vector<double> alphas(static_cast<std::size_t>(n_spins));
        Eigen::VectorXcd phases(n);
        Eigen::MatrixXcd avg(n, n);
        reference = sample(0, alphas, phases, avg);
    }

    const long long n_chunks = (n_samples + kSampleChunk - 1) / kSampleChunk;
    std::vector<Eigen::MatrixXcd> sums(static_cast<std::size_t>(n_chunks));
    std::vector<Eigen::MatrixXd> sq_re(static_cast<std::size_t>(n_chunks));
    std::vector<Eigen::MatrixXd> sq_im(static_cast<std::size_t>(n_chunks));

#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < n_chunks; ++c) {
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
        Eigen::MatrixXd sre = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd sim = Eigen::MatrixXd::Zero(n, n);
        std::vector<double> alphas(static_cast<std::size_t>(n_spins));
        Eigen::VectorXcd phases(n);
        Eigen::MatrixXcd avg(n, n);
        const long long begin = c * kSampleChunk;
        const long long end = std::min(n_samples, begin + kSampleChunk);
        for (long long i = begin; i < end; ++i) {
            const Eigen::MatrixXcd dev = sample(i, alphas, phases, avg) - reference;
            sum += dev;
            sre += dev.real().cwiseAbs2();
            sim += dev.imag().cwiseAbs2();
        }
        sums[static_cast<std::size_t>(c)] = sum;
        sq_re[static_cast<std::size_t>(c)] = sre;
        sq_im[static_cast<std::size_t>(c)] = sim;
    }

    Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXd total_re = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd total_im = Eigen::MatrixXd::Zero(n, n);
    for (long long c = 0; c < n_chunks; ++c) {
        total += sums[static_cast<std::size_t>(c)];
        total_re += sq_re[static_cast<std::size_t>(c)];
        total_im += sq_im[static_cast<std::size_t>(c)];
    }
    const double count = static_cast<double>(n_samples);
    const Eigen::MatrixXcd mean_dev = total / count;
    GaussianSampleResult out{DensityMatrix::unchecked(reference + mean_dev), Eigen::MatrixXd::Zero(n, n),
                             Eigen::MatrixXd::Zero(n, n), n_samples, seed};
    if (n_samples > 1) {
        const auto stderr_of = [&](const Eigen::MatrixXd& sq, const Eigen::MatrixXd& mu) {
            Eigen::MatrixXd var = (sq - count * mu.cwiseAbs2()) / (count - 1.0);
            return Eigen::MatrixXd(var.cwiseMax(0.0).cwiseSqrt() / std::sqrt(count));
        };
        out.stderr_re = stderr_of(total_re, mean_dev.real());
        out.stderr_im = stderr_of(total_im, mean_dev.imag());
    }
    return out;
}

}  // namespace ringdeco
