#include "ringdeco/wavepacket.hpp"

#include <cmath>
#include <string>

#include "ringdeco/error.hpp"

namespace ringdeco {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e^{-i k_n j} / sqrt(N) with the product reduced mod N
cplx plane_wave(int n, long long j, int n_sites) {
    const int r = wrap_site(static_cast<long long>(n) * j, n_sites);
    return std::polar(1.0 / std::sqrt(static_cast<double>(n_sites)), -kTwoPi * r / n_sites);
}

void check_ring(const RingConfig& cfg, const WavepacketSpec& spec) {
    cfg.validate();
    spec.validate();
    if (cfg.n_sites != spec.n_sites) {
        throw ValidationError("wavepacket.n_sites (" + std::to_string(spec.n_sites) +
                              ") differs from ring.n_sites (" + std::to_string(cfg.n_sites) + ")");
    }
}

Eigen::VectorXcd sites_from_momentum(const Eigen::VectorXcd& a) {
    const int n = static_cast<int>(a.size());
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j < n; ++j) {
        for (int m = 0; m < n; ++m) psi(j) += a(m) * plane_wave(m, j, n);
    }
    return psi;
}

// S_{nn'} = sum_m J_m(4 Delta0 t sin(dk/2)) e^{i m (kbar - Phi/N)} F(-m)
Eigen::MatrixXcd pair_kernel(const RingConfig& cfg, const BathSpec& bath, double t, double tol) {
    const int n = cfg.n_sites;
    int m_max = bessel_order_cutoff(4.0 * cfg.hop * t, tol);
    if (const auto* g = std::get_if<GaussianEnsemble>(&bath.model); g != nullptr && g->lambda > 0.0) {
        const double reach = std::ceil(std::sqrt(-2.0 * std::log(tol) / g->lambda));
        if (reach < m_max) m_max = static_cast<int>(reach);
    }
    std::vector<cplx> weight(static_cast<std::size_t>(2 * m_max + 1));
    for (int m = -m_max; m <= m_max; ++m) weight[static_cast<std::size_t>(m + m_max)] = influence(bath, -m);

    Eigen::MatrixXcd s(n, n);
    std::vector<double> bes;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double ka = cfg.momentum(a);
            const double kb = cfg.momentum(b);
            bessel_j_nonneg(m_max, 4.0 * cfg.hop * t * std::sin(0.5 * (ka - kb)), bes);
            const double phi = 0.5 * (ka + kb) - cfg.link_phase();
            cplx acc = 0.0;
            for (int m = -m_max; m <= m_max; ++m) {
                const double jm = m < 0 ? ((m & 1) ? -1.0 : 1.0) * bes[static_cast<std::size_t>(-m)]
                                        : bes[static_cast<std::size_t>(m)];
                if (jm == 0.0) continue;
                acc += jm * std::polar(1.0, m * phi) * weight[static_cast<std::size_t>(m + m_max)];
            }
            s(a, b) = acc;
        }
    }
    return s;
}

Eigen::VectorXd decohered_by_pairs(const RingConfig& cfg, const BathSpec& bath, const InitialState& st,
                                   double t, double tol) {
    const int n = cfg.n_sites;
    const Eigen::MatrixXcd s = pair_kernel(cfg, bath, t, tol);
    // rho_k(n, n') = a_n a_n'^* S_{nn'}; then back to sites
    Eigen::MatrixXcd rho_k(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) rho_k(a, b) = st.momentum(a) * std::conj(st.momentum(b)) * s(a, b);
    }
    Eigen::VectorXd p(n);
    for (int j = 0; j < n; ++j) {
        cplx acc = 0.0;
        for (int a = 0; a < n; ++a) {
            const cplx pa = plane_wave(a, j, n);
            for (int b = 0; b < n; ++b) acc += pa * std::conj(plane_wave(b, j, n)) * rho_k(a, b);
        }
        p(j) = acc.real();
    }
    return p;
}

Eigen::VectorXd decohered_by_propagator(const RingConfig& cfg, const BathSpec& bath, const InitialState& st,
                                        double t, double tol) {
    ReducedOptions opts;
    opts.tol = tol;
    const Eigen::MatrixXcd rho = propagator_reduced(cfg, bath, t, opts).kernel.apply_serial(st.density().matrix());
    return rho.diagonal().real();
}

}  // namespace

void WavepacketSpec::validate() const {
    if (n_sites < 3) throw ValidationError("wavepacket.n_sites must be >= 3");
    if (!std::isfinite(width) || !(width > 0.0)) throw ValidationError("wavepacket.width must be finite and > 0");
    if (offset < 0 || offset >= n_sites) {
        throw ValidationError("wavepacket.offset must lie in [0, n_sites)");
    }
    if (!std::isfinite(k_center)) throw ValidationError("wavepacket.k_center must be finite");
}

Eigen::VectorXd packet_weights(const WavepacketSpec& spec) {
    spec.validate();
    const int n = spec.n_sites;
    Eigen::VectorXd g(n);
    for (int m = 0; m < n; ++m) {
        const double dk = kTwoPi * m / n - spec.k_center;
        g(m) = std::exp(-0.5 * dk * dk * spec.width);
    }
    const double z = g.norm();
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw ValidationError("wavepacket weights vanish; width too large for this k_center");
    }
    return g / z;
}

InitialState build_state(const WavepacketSpec& spec) {
    const Eigen::VectorXd g = packet_weights(spec);
    const int n = spec.n_sites;
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n);
    for (int m = 0; m < n; ++m) {
        // translating by j0 multiplies <k_m|psi> by e^{i k_m j0}
        a(m) += g(m) * std::conj(plane_wave(m, spec.offset, n)) * std::sqrt(static_cast<double>(n));
    }
    if (spec.include_second) {
        for (int m = 0; m < n; ++m) a(wrap_site(n - m, n)) += g(m);
    }
    const double norm = a.norm();
    if (!(norm > 0.0)) throw ValidationError("wave packets cancel exactly; state has zero norm");
    a /= norm;
    InitialState st;
    st.momentum = a;
    st.sites = sites_from_momentum(a);
    return st;
}

Eigen::VectorXd probs_wavepacket_free(const RingConfig& cfg, const WavepacketSpec& spec, double t) {
    check_ring(cfg, spec);
    require_time(t);
    const InitialState st = build_state(spec);
    const int n = cfg.n_sites;
    Eigen::VectorXcd evolved(n);
    for (int m = 0; m < n; ++m) evolved(m) = st.momentum(m) * std::polar(1.0, -dispersion(cfg, m) * t);
    return sites_from_momentum(evolved).cwiseAbs2();
}

double prob_wavepacket_free(const RingConfig& cfg, const WavepacketSpec& spec, int j, double t) {
    require_site(cfg, j, "site");
    return probs_wavepacket_free(cfg, spec, t)(j);
}

Eigen::VectorXd probs_wavepacket_decohered(const RingConfig& cfg, const BathSpec& bath,
                                           const WavepacketSpec& spec, double t,
                                           const WavepacketOptions& opts) {
    check_ring(cfg, spec);
    bath.validate();
    require_time(t);
    const InitialState st = build_state(spec);
    return opts.use_propagator ? decohered_by_propagator(cfg, bath, st, t, opts.tol)
                               : decohered_by_pairs(cfg, bath, st, t, opts.tol);
}

double prob_wavepacket_decohered(const RingConfig& cfg, const BathSpec& bath, const WavepacketSpec& spec,
                                 int j, double t, const WavepacketOptions& opts) {
    require_site(cfg, j, "site");
    return probs_wavepacket_decohered(cfg, bath, spec, t, opts)(j);
}

std::vector<Eigen::VectorXd> wavepacket_series(const RingConfig& cfg, const BathSpec& bath,
                                               const WavepacketSpec& spec, const TimeGrid& grid,
                                               const WavepacketOptions& opts) {
    grid.validate();
    std::vector<Eigen::VectorXd> out(grid.size());
    const long long count = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        out[idx] = probs_wavepacket_decohered(cfg, bath, spec, grid.times[idx], opts);
    }
    return out;
}

namespace serial {

std::vector<Eigen::VectorXd> wavepacket_series(const RingConfig& cfg, const BathSpec& bath,
                                               const WavepacketSpec& spec, const TimeGrid& grid,
                                               const WavepacketOptions& opts) {
    grid.validate();
    std::vector<Eigen::VectorXd> out;
    out.reserve(grid.size());
    for (double t : grid.times) out.push_back(probs_wavepacket_decohered(cfg, bath, spec, t, opts));
    return out;
}

}  // namespace serial

double group_velocity(const RingConfig& cfg, double k) {
    return 2.0 * cfg.hop * std::sin(k - cfg.link_phase());
}

std::vector<double> crossing_times(const RingConfig& cfg, const WavepacketSpec& spec, double t_max) {
    check_ring(cfg, spec);
    const double v1 = group_velocity(cfg, spec.k_center);
    const double v2 = group_velocity(cfg, kTwoPi - spec.k_center);
    const double closing = v1 - v2;  // separation x1 - x2 = offset + closing t
    std::vector<double> out;
    if (closing == 0.0) return out;
    const int n = cfg.n_sites;
    const double rate = std::abs(closing);
    // separation hits a multiple of N every N / rate; first hit below
    double first = (closing > 0.0 ? wrap_site(-spec.offset, n) : spec.offset) / rate;
    if (first <= 0.0) first += n / rate;
    for (double t = first; t <= t_max; t += n / rate) out.push_back(t);
    return out;
}

RingMoments ring_moments(const Eigen::VectorXd& probs) {
    const int n = static_cast<int>(probs.size());
    cplx phasor = 0.0;
    for (int j = 0; j < n; ++j) phasor += probs(j) * std::polar(1.0, kTwoPi * j / n);
    RingMoments r;
    double angle = std::arg(phasor);
    if (angle < 0.0) angle += kTwoPi;
    r.centroid = angle * n / kTwoPi;
    for (int j = 0; j < n; ++j) {
        double d = std::fmod(j - r.centroid, static_cast<double>(n));
        if (d > 0.5 * n) d -= n;
        if (d < -0.5 * n) d += n;
        r.variance += probs(j) * d * d;
    }
    return r;
}

}  // namespace ringdeco
