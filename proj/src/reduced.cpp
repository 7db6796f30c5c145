#include "ringdeco/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ringdeco/error.hpp"
#include "ringdeco/winding.hpp"

namespace ringdeco {
namespace {

// Largest |w| whose Gaussian weight can still reach tol, widened by the
// shift so F(w + shift) is covered too.
int gaussian_cutoff(double lambda, double tol, int shift) {
    const double reach = std::sqrt(-2.0 * std::log(tol) / lambda);
    if (reach > 1e8) return std::numeric_limits<int>::max();
    return static_cast<int>(std::ceil(reach)) + std::abs(shift);
}

void validate_opts(const ReducedOptions& opts) {
    if (!(opts.tol > 0.0) || !(opts.tol < 1.0)) throw ValidationError("tolerance must lie in (0, 1)");
}

}  // namespace

ReducedPropagator propagator_reduced(const RingConfig& cfg, const BathSpec& bath, double t,
                                     const ReducedOptions& opts) {
    cfg.validate();
    bath.validate();
    require_time(t);
    validate_opts(opts);
    const int n = cfg.n_sites;

    ReducedPropagator out;
    out.bath = bath;
    out.truncation = free_truncation(cfg, t, opts.tol);

    int w_max = winding::single_sum_cutoff(cfg, t, opts.tol);
    if (const auto* g = std::get_if<GaussianEnsemble>(&bath.model); g != nullptr && g->lambda > 0.0) {
        w_max = std::min(w_max, gaussian_cutoff(g->lambda, opts.tol, opts.influence_shift));
    }
    out.w_max = w_max;

    const int reach_w = opts.naive_double_sum ? n * (2 * out.truncation.p_max + 1) : w_max;
    const int p_range = (reach_w + std::abs(opts.influence_shift)) / n + 1;
    const InfluenceTable table = build_influence_table(bath, n, n, p_range);
    const auto weight = [&](int w) {
        const int shifted = w + opts.influence_shift;
        cplx f = table.at(shifted % n, shifted / n);
        if (opts.mutate_influence && shifted < 0) f = -f;
        return f;
    };

    if (opts.naive_double_sum) {
        out.kernel = Propagator(winding::double_sum_table(cfg, t, out.truncation.p_max, weight));
    } else {
        out.kernel = Propagator(winding::single_sum_table(cfg, t, w_max, weight));
    }
    return out;
}

namespace {

DensityMatrix evolve_one(const RingConfig& cfg, const BathSpec& bath, const DensityMatrix& rho_in,
                         double t, const ReducedOptions& opts) {
    return DensityMatrix::unchecked(propagator_reduced(cfg, bath, t, opts).kernel.apply_serial(rho_in.matrix()));
}

void check_inputs(const RingConfig& cfg, const BathSpec& bath, const DensityMatrix& rho_in,
                  const TimeGrid& grid) {
    cfg.validate();
    bath.validate();
    grid.validate();
    require_dim(cfg, rho_in.matrix());
}

}  // namespace

std::vector<DensityMatrix> density_reduced(const RingConfig& cfg, const BathSpec& bath,
                                           const DensityMatrix& rho_in, const TimeGrid& grid,
                                           const ReducedOptions& opts) {
    check_inputs(cfg, bath, rho_in, grid);
    std::vector<DensityMatrix> out(grid.size());
    const long long count = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        out[idx] = evolve_one(cfg, bath, rho_in, grid.times[idx], opts);
    }
    return out;
}

namespace serial {

std::vector<DensityMatrix> density_reduced(const RingConfig& cfg, const BathSpec& bath,
                                           const DensityMatrix& rho_in, const TimeGrid& grid,
                                           const ReducedOptions& opts) {
    check_inputs(cfg, bath, rho_in, grid);
    std::vector<DensityMatrix> out;
    out.reserve(grid.size());
    for (double t : grid.times) out.push_back(evolve_one(cfg, bath, rho_in, t, opts));
    return out;
}

}  // namespace serial

double prob_reduced(const RingConfig& cfg, const BathSpec& bath, int j, double t, double tol) {
    require_site(cfg, j, "site");
    ReducedOptions opts;
    opts.tol = tol;
    // K_{jj,00} = table(j, j): both paths end on j, so mu = 0
    return propagator_reduced(cfg, bath, t, opts).kernel.table()(j, j).real();
}

double asymptotic_amplitude_n3(const BathSpec& bath, double flux, double tol) {
    bath.validate();
    double amp = 1.0;
    // |F| <= 1; a non-decaying bath makes the series meaningless, so cap it
    constexpr int kMaxTerms = 10000;
    for (int p = 1; p <= kMaxTerms; ++p) {
        const cplx f = influence(bath, 6LL * p);
        if (std::abs(f) < tol) break;
        const double sign = (p & 1) ? -1.0 : 1.0;
        amp += 2.0 * sign * (std::polar(1.0, 2.0 * p * flux) * f).real();
    }
    return amp;
}

AsymptoticResult prob_asymptotic_n3(const RingConfig& cfg, const BathSpec& bath, double t, double tol) {
    cfg.validate();
    require_time(t);
    if (cfg.n_sites != 3) throw ValidationError("prob_asymptotic_n3 needs a 3-site ring");
    AsymptoticResult r;
    r.amplitude = asymptotic_amplitude_n3(bath, cfg.flux, tol);
    const double s3 = std::sqrt(3.0);
    const double dt = cfg.hop * t;
    if (dt > 0.0) {
        r.value = (1.0 + 2.0 * r.amplitude * std::cos(2.0 * s3 * dt - std::numbers::pi / 4) /
                             std::sqrt(std::numbers::pi * s3 * dt)) / 3.0;
    } else {
        r.value = std::numeric_limits<double>::quiet_NaN();
    }
    double lambda = 0.0;
    if (const auto* g = std::get_if<GaussianEnsemble>(&bath.model)) {
        lambda = g->lambda;
    } else {
        // prod_k cos(w a_k) ~ exp(-w^2 sum_k a_k^2 / 2), the Gaussian form at twice the topological lambda
        lambda = 2.0 * topological_lambda(bath);
    }
    if (lambda > 0.0) {
        const double p_max = std::sqrt(5.0 / (9.0 * lambda));
        r.precondition_ok = 2.0 * s3 * dt >= 36.0 * p_max * p_max;
    }
    return r;
}

Eigen::VectorXd currents_reduced(const RingConfig& cfg, const BathSpec& bath,
                                 const DensityMatrix& rho_in, double t, const ReducedOptions& opts) {
    require_dim(cfg, rho_in.matrix());
    ReducedOptions shifted = opts;
    shifted.influence_shift = opts.influence_shift - 1;
    const Eigen::MatrixXcd dressed = propagator_reduced(cfg, bath, t, shifted).apply(rho_in.matrix());
    Eigen::VectorXd out(cfg.n_sites);
    for (int j = 0; j < cfg.n_sites; ++j) out(j) = bond_current(cfg, dressed, j);
    return out;
}

double current_reduced(const RingConfig& cfg, const BathSpec& bath, const DensityMatrix& rho_in,
                       int j, double t, const ReducedOptions& opts) {
    cfg.validate();
    require_site(cfg, j, "bond");
    return currents_reduced(cfg, bath, rho_in, t, opts)(j);
}

}  // namespace ringdeco
