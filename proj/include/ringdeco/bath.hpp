#pragma once

// Spin-bath influence functions. A path pair whose phases differ by
// w = N pbar + mu link traversals picks up the bath average F(w).

#include <complex>
#include <variant>
#include <vector>

namespace ringdeco {

using cplx = std::complex<double>;

/// Couplings |alpha_k| (radians per link) and optional polarisations m_k in
/// [-1, 1] of each spin along its coupling axis. Empty polarisations means
/// thermal (all m_k = 0).
struct FixedCouplings {
    std::vector<double> alphas;
    std::vector<double> polarizations;

    bool thermal() const;
    double polarization(std::size_t k) const { return polarizations.empty() ? 0.0 : polarizations[k]; }
    bool operator==(const FixedCouplings&) const = default;
};

/// Couplings drawn from a Gaussian ensemble; lambda = N_s * lambda_0.
struct GaussianEnsemble {
    double lambda = 0.0;
    bool operator==(const GaussianEnsemble&) const = default;
};

struct BathSpec {
    std::variant<FixedCouplings, GaussianEnsemble> model{FixedCouplings{}};

    static BathSpec none() { return {}; }
    static BathSpec fixed(std::vector<double> alphas, std::vector<double> polarizations = {});
    static BathSpec gaussian(double lambda);

    void validate() const;
    bool is_fixed() const { return std::holds_alternative<FixedCouplings>(model); }
    bool is_gaussian() const { return std::holds_alternative<GaussianEnsemble>(model); }
    /// True when every influence value is 1 (no spins, all-zero couplings, lambda 0).
    bool trivial() const;
    bool operator==(const BathSpec&) const = default;
};

/// F(w) for an integer phase offset w = N pbar + mu.
cplx influence(const BathSpec& spec, long long w);

/// prod_k [cos(w |a_k|) + i m_k sin(w |a_k|)], w = N pbar + mu.
cplx influence_fixed(const BathSpec& spec, int n_sites, int mu, int pbar);
/// exp(-lambda (N pbar + mu)^2 / 2).
double influence_gaussian(const BathSpec& spec, int n_sites, int mu, int pbar);
/// (1/2) sum_k |alpha_k|^2.
double topological_lambda(const BathSpec& spec);

class InfluenceTable {
public:
    InfluenceTable() = default;
    InfluenceTable(int n_sites, int mu_range, int p_range, std::vector<cplx> values);

    int n_sites() const { return n_sites_; }
    int mu_range() const { return mu_range_; }
    int p_range() const { return p_range_; }
    bool contains(int mu, int pbar) const;
    /// Throws IndexError outside the tabulated ranges.
    cplx at(int mu, int pbar) const;

private:
    int n_sites_ = 0;
    int mu_range_ = 0;
    int p_range_ = 0;
    std::vector<cplx> values_;  // row-major over (pbar, mu)
};

InfluenceTable build_influence_table(const BathSpec& spec, int n_sites, int mu_range, int p_range);

}  // namespace ringdeco
