#include "ringdeco/ring.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ringdeco/error.hpp"
#include "ringdeco/winding.hpp"

namespace ringdeco {
namespace {

constexpr double kPi = std::numbers::pi;

// (-i)^nu, exact
cplx minus_i_pow(int nu) {
    switch (wrap_site(nu, 4)) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, -1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, 1.0};
    }
}

// e^{-i pi r / N} with r reduced mod 2N so the argument stays small
cplx half_root(long long r, int n) {
    const int red = wrap_site(r, 2 * n);
    return std::polar(1.0, -kPi * red / n);
}

}  // namespace

void RingConfig::validate() const {
    if (n_sites < 3) {
        throw ValidationError("ring.n_sites must be >= 3 (got " + std::to_string(n_sites) + ")");
    }
    if (!std::isfinite(hop) || !(hop > 0.0)) {
        throw ValidationError("ring.hop must be finite and > 0");
    }
    if (!std::isfinite(flux)) throw ValidationError("ring.flux must be finite");
}

double RingConfig::momentum(int n) const { return 2.0 * kPi * n / n_sites; }

TimeGrid TimeGrid::uniform(double t_max, int n_steps) {
    if (!std::isfinite(t_max) || t_max < 0.0) {
        throw ValidationError("grid.t_max must be finite and >= 0");
    }
    if (n_steps < 0) throw ValidationError("grid.steps must be >= 0");
    TimeGrid g;
    g.times.resize(static_cast<std::size_t>(n_steps) + 1);
    for (int i = 0; i <= n_steps; ++i) {
        g.times[static_cast<std::size_t>(i)] = n_steps == 0 ? 0.0 : t_max * i / n_steps;
    }
    return g;
}

void TimeGrid::validate() const {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0.0) {
            throw ValidationError("time grid entries must be finite and >= 0");
        }
        if (i > 0 && times[i] < times[i - 1]) {
            throw ValidationError("time grid must be non-decreasing");
        }
    }
}

SumForm parse_sum_form(std::string_view text) {
    if (text == "double") return SumForm::kDouble;
    if (text == "single") return SumForm::kSingle;
    if (text == "auto") return SumForm::kAuto;
    throw ValidationError("sum form must be one of double|single|auto, got '" +
                          std::string(text) + "'");
}

std::string_view to_string(SumForm form) {
    switch (form) {
        case SumForm::kDouble: return "double";
        case SumForm::kSingle: return "single";
        case SumForm::kAuto: break;
    }
    return "auto";
}

SumForm resolve_sum_form(SumForm form, int n_sites, int p_max) {
    if (form != SumForm::kAuto) return form;
    return n_sites * p_max > kAutoSingleThreshold ? SumForm::kSingle : SumForm::kDouble;
}

void require_site(const RingConfig& cfg, int j, const char* what) {
    if (j < 0 || j >= cfg.n_sites) {
        throw IndexError(std::string(what) + " " + std::to_string(j) + " outside [0, " +
                         std::to_string(cfg.n_sites) + ")");
    }
}

void require_time(double t) {
    if (!std::isfinite(t)) throw ValidationError("time must be finite");
    if (t < 0.0) throw ValidationError("negative times are not propagated");
}

void require_dim(const RingConfig& cfg, const Eigen::MatrixXcd& rho) {
    if (rho.rows() != cfg.n_sites || rho.cols() != cfg.n_sites) {
        throw ValidationError("density matrix is " + std::to_string(rho.rows()) + "x" +
                              std::to_string(rho.cols()) + " but the ring has " +
                              std::to_string(cfg.n_sites) + " sites");
    }
}

Propagator Propagator::identity(int n_sites) {
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n_sites, n_sites);
    t(0, 0) = 1.0;
    return Propagator(std::move(t));
}

cplx Propagator::operator()(int j, int jp, int l, int lp) const {
    const int n = n_sites();
    return table_(wrap_site(j - l, n), wrap_site(jp - lp, n));
}

Eigen::MatrixXcd Propagator::apply_serial(const Eigen::MatrixXcd& rho_in) const {
    const int n = n_sites();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        for (int jp = 0; jp < n; ++jp) {
            cplx acc = 0.0;
            for (int l = 0; l < n; ++l) {
                const int c = wrap_site(j - l, n);
                for (int lp = 0; lp < n; ++lp) {
                    acc += table_(c, wrap_site(jp - lp, n)) * rho_in(l, lp);
                }
            }
            out(j, jp) = acc;
        }
    }
    return out;
}

Eigen::MatrixXcd Propagator::apply(const Eigen::MatrixXcd& rho_in) const {
    const int n = n_sites();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
        for (int jp = 0; jp < n; ++jp) {
            cplx acc = 0.0;
            for (int l = 0; l < n; ++l) {
                const int c = wrap_site(j - l, n);
                for (int lp = 0; lp < n; ++lp) {
                    acc += table_(c, wrap_site(jp - lp, n)) * rho_in(l, lp);
                }
            }
            out(j, jp) = acc;
        }
    }
    return out;
}

double dispersion(const RingConfig& cfg, int n) {
    cfg.validate();
    if (n < 0 || n >= cfg.n_sites) {
        throw IndexError("momentum index " + std::to_string(n) + " outside [0, " +
                         std::to_string(cfg.n_sites) + ")");
    }
    return 2.0 * cfg.hop * std::cos(cfg.momentum(n) - cfg.link_phase());
}

Eigen::VectorXcd green_column(const RingConfig& cfg, double t) {
    cfg.validate();
    require_time(t);
    const int n = cfg.n_sites;
    Eigen::VectorXcd phase(n);
    for (int m = 0; m < n; ++m) {
        phase(m) = std::polar(1.0 / n, -dispersion(cfg, m) * t);
    }
    Eigen::VectorXcd g(n);
    for (int c = 0; c < n; ++c) {
        // G_{c,0} = (1/N) sum_m e^{-i eps_m t} e^{-i k_m c}
        cplx acc = 0.0;
        for (int m = 0; m < n; ++m) acc += phase(m) * half_root(2LL * m * c, n);
        g(c) = acc;
    }
    return g;
}

cplx green_free(const RingConfig& cfg, int j, int jp, double t) {
    cfg.validate();
    require_site(cfg, j, "site");
    require_site(cfg, jp, "site");
    return green_column(cfg, t)(wrap_site(j - jp, cfg.n_sites));
}

WindingTruncation free_truncation(const RingConfig& cfg, double t, double tol) {
    return choose_truncation(2.0 * cfg.hop * t, cfg.n_sites, tol);
}

cplx green_free_winding(const RingConfig& cfg, int j, int jp, double t, double tol) {
    cfg.validate();
    require_site(cfg, j, "site");
    require_site(cfg, jp, "site");
    require_time(t);
    const int n = cfg.n_sites;
    const double x = 2.0 * cfg.hop * t;
    const int p_max = free_truncation(cfg, t, tol).p_max;
    cplx acc = 0.0;
    for (int p = -p_max; p <= p_max; ++p) {
        const int nu = n * p + j - jp;
        acc += bessel_j(nu, x) * minus_i_pow(nu) * std::polar(1.0, -nu * cfg.link_phase());
    }
    return acc;
}

namespace winding {

Eigen::MatrixXcd double_sum_table(const RingConfig& cfg, double t, int p_max, const Weight& weight) {
    const int n = cfg.n_sites;
    const double x = 2.0 * cfg.hop * t;
    const int reach = n * p_max + n;
    const std::vector<double> bes = bessel_j_batch({-reach, reach}, x);
    auto amp = [&](int nu) {
        return bes[static_cast<std::size_t>(nu + reach)] * minus_i_pow(nu) *
               std::polar(1.0, -nu * cfg.link_phase());
    };
    Eigen::MatrixXcd table = Eigen::MatrixXcd::Zero(n, n);
    for (int c = 0; c < n; ++c) {
        for (int cp = 0; cp < n; ++cp) {
            cplx acc = 0.0;
            for (int p = -p_max; p <= p_max; ++p) {
                const int nu = n * p + c;
                const cplx a = amp(nu);
                if (a == 0.0) continue;
                for (int pp = -p_max; pp <= p_max; ++pp) {
                    const int nup = n * pp + cp;
                    acc += a * std::conj(amp(nup)) * weight(nup - nu);
                }
            }
            table(c, cp) = acc;
        }
    }
    return table;
}

int single_sum_cutoff(const RingConfig& cfg, double t, double tol) {
    return bessel_order_cutoff(4.0 * cfg.hop * t, tol);
}

Eigen::MatrixXcd single_sum_table(const RingConfig& cfg, double t, int w_max, const Weight& weight) {
    const int n = cfg.n_sites;
    const double theta = cfg.link_phase();
    const int width = 2 * w_max + 1;
    // inner(w + w_max, c) = (1/N) sum_m J_w(y_m) e^{-i k_m (w/2 + c)}
    Eigen::MatrixXcd inner = Eigen::MatrixXcd::Zero(width, n);
    std::vector<double> bes;
    for (int m = 0; m < n; ++m) {
        const double y = 4.0 * cfg.hop * t * std::sin(kPi * m / n);
        bessel_j_nonneg(w_max, y, bes);
        for (int w = -w_max; w <= w_max; ++w) {
            const double jw = w < 0 ? ((w & 1) ? -1.0 : 1.0) * bes[static_cast<std::size_t>(-w)]
                                    : bes[static_cast<std::size_t>(w)];
            if (jw == 0.0) continue;
            for (int c = 0; c < n; ++c) {
                inner(w + w_max, c) += (jw / n) * half_root(static_cast<long long>(m) * (w + 2 * c), n);
            }
        }
    }
    const int pbar_max = (w_max + n) / n + 1;
    Eigen::MatrixXcd table = Eigen::MatrixXcd::Zero(n, n);
    for (int c = 0; c < n; ++c) {
        for (int cp = 0; cp < n; ++cp) {
            cplx acc = 0.0;
            for (int pb = -pbar_max; pb <= pbar_max; ++pb) {
                const int w = n * pb + cp - c;
                if (w < -w_max || w > w_max) continue;
                const double sign = (w & 1) ? -1.0 : 1.0;
                acc += weight(w) * sign * std::polar(1.0, w * theta) * inner(w + w_max, c);
            }
            table(c, cp) = acc;
        }
    }
    return table;
}

}  // namespace winding

Propagator propagator_free(const RingConfig& cfg, double t, SumForm form, double tol) {
    cfg.validate();
    require_time(t);
    if (t == 0.0) return Propagator::identity(cfg.n_sites);
    const WindingTruncation tr = free_truncation(cfg, t, tol);
    const auto unit = [](int) { return cplx(1.0, 0.0); };
    if (resolve_sum_form(form, cfg.n_sites, tr.p_max) == SumForm::kDouble) {
        return Propagator(winding::double_sum_table(cfg, t, tr.p_max, unit));
    }
    return Propagator(winding::single_sum_table(cfg, t, winding::single_sum_cutoff(cfg, t, tol), unit));
}

double prob_free(const RingConfig& cfg, int j, double t) {
    return std::norm(green_free(cfg, j, 0, t));
}

double bond_current(const RingConfig& cfg, const Eigen::MatrixXcd& rho, int j) {
    const int next = wrap_site(j + 1, cfg.n_sites);
    return 2.0 * (cfg.hop * std::polar(1.0, -cfg.link_phase()) * rho(j, next)).imag();
}

double current_free(const RingConfig& cfg, const DensityMatrix& rho, int j) {
    cfg.validate();
    require_dim(cfg, rho.matrix());
    require_site(cfg, j, "bond");
    return bond_current(cfg, rho.matrix(), j);
}

Eigen::MatrixXcd evolve_unitary_free(const RingConfig& cfg, const Eigen::MatrixXcd& rho_in, double t) {
    require_dim(cfg, rho_in);
    const Eigen::VectorXcd g = green_column(cfg, t);
    const int n = cfg.n_sites;
    Eigen::MatrixXcd u(n, n);
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) u(j, l) = g(wrap_site(j - l, n));
    }
    return u * rho_in * u.adjoint();
}

namespace {

DensityMatrix evolve_one(const RingConfig& cfg, const DensityMatrix& rho_in, double t,
                         SumForm form, double tol) {
    return DensityMatrix::unchecked(propagator_free(cfg, t, form, tol).apply_serial(rho_in.matrix()));
}

void check_inputs(const RingConfig& cfg, const DensityMatrix& rho_in, const TimeGrid& grid) {
    cfg.validate();
    grid.validate();
    require_dim(cfg, rho_in.matrix());
}

}  // namespace

std::vector<DensityMatrix> density_free(const RingConfig& cfg, const DensityMatrix& rho_in,
                                        const TimeGrid& grid, SumForm form, double tol) {
    check_inputs(cfg, rho_in, grid);
    std::vector<DensityMatrix> out(grid.size());
    const long long count = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = evolve_one(cfg, rho_in, grid.times[static_cast<std::size_t>(i)], form, tol);
    }
    return out;
}

namespace serial {

std::vector<DensityMatrix> density_free(const RingConfig& cfg, const DensityMatrix& rho_in,
                                        const TimeGrid& grid, SumForm form, double tol) {
    check_inputs(cfg, rho_in, grid);
    std::vector<DensityMatrix> out;
    out.reserve(grid.size());
    for (double t : grid.times) out.push_back(evolve_one(cfg, rho_in, t, form, tol));
    return out;
}

}  // namespace serial
}  // namespace ringdeco
