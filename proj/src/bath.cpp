#include "ringdeco/bath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ringdeco/error.hpp"

namespace ringdeco {

bool FixedCouplings::thermal() const {
    return std::all_of(polarizations.begin(), polarizations.end(), [](double m) { return m == 0.0; });
}

BathSpec BathSpec::fixed(std::vector<double> alphas, std::vector<double> polarizations) {
    BathSpec b;
    b.model = FixedCouplings{std::move(alphas), std::move(polarizations)};
    b.validate();
    return b;
}

BathSpec BathSpec::gaussian(double lambda) {
    BathSpec b;
    b.model = GaussianEnsemble{lambda};
    b.validate();
    return b;
}

void BathSpec::validate() const {
    if (const auto* f = std::get_if<FixedCouplings>(&model)) {
        for (double a : f->alphas) {
            if (!std::isfinite(a)) throw ValidationError("bath.alphas must be finite");
        }
        if (!f->polarizations.empty() && f->polarizations.size() != f->alphas.size()) {
            throw ValidationError("bath.polarizations needs one entry per coupling (" +
                                  std::to_string(f->alphas.size()) + "), got " +
                                  std::to_string(f->polarizations.size()));
        }
        for (double m : f->polarizations) {
            if (!std::isfinite(m) || m < -1.0 || m > 1.0) {
                throw ValidationError("bath.polarizations must lie in [-1, 1]");
            }
        }
    } else {
        const double lambda = std::get<GaussianEnsemble>(model).lambda;
        if (!std::isfinite(lambda) || lambda < 0.0) {
            throw ValidationError("bath.lambda must be finite and >= 0");
        }
    }
}

bool BathSpec::trivial() const {
    if (const auto* f = std::get_if<FixedCouplings>(&model)) {
        return std::all_of(f->alphas.begin(), f->alphas.end(), [](double a) { return a == 0.0; });
    }
    return std::get<GaussianEnsemble>(model).lambda == 0.0;
}

cplx influence(const BathSpec& spec, long long w) {
    if (const auto* f = std::get_if<FixedCouplings>(&spec.model)) {
        cplx acc{1.0, 0.0};
        const double dw = static_cast<double>(w);
        for (std::size_t k = 0; k < f->alphas.size(); ++k) {
            const double phase = dw * std::abs(f->alphas[k]);
            acc *= cplx(std::cos(phase), f->polarization(k) * std::sin(phase));
        }
        return acc;
    }
    const double lambda = std::get<GaussianEnsemble>(spec.model).lambda;
    const double dw = static_cast<double>(w);
    return {std::exp(-0.5 * lambda * dw * dw), 0.0};
}

cplx influence_fixed(const BathSpec& spec, int n_sites, int mu, int pbar) {
    if (!spec.is_fixed()) throw TypeError("influence_fixed needs a FixedCouplings bath");
    return influence(spec, static_cast<long long>(n_sites) * pbar + mu);
}

double influence_gaussian(const BathSpec& spec, int n_sites, int mu, int pbar) {
    if (!spec.is_gaussian()) throw TypeError("influence_gaussian needs a GaussianEnsemble bath");
    return influence(spec, static_cast<long long>(n_sites) * pbar + mu).real();
}

double topological_lambda(const BathSpec& spec) {
    const auto* f = std::get_if<FixedCouplings>(&spec.model);
    if (f == nullptr) throw TypeError("topological_lambda needs a FixedCouplings bath");
    double acc = 0.0;
    for (double a : f->alphas) acc += a * a;
    return 0.5 * acc;
}

InfluenceTable::InfluenceTable(int n_sites, int mu_range, int p_range, std::vector<cplx> values)
    : n_sites_(n_sites), mu_range_(mu_range), p_range_(p_range), values_(std::move(values)) {
    const auto expected = static_cast<std::size_t>(2 * mu_range + 1) * static_cast<std::size_t>(2 * p_range + 1);
    if (values_.size() != expected) throw ValidationError("InfluenceTable: value count mismatch");
}

bool InfluenceTable::contains(int mu, int pbar) const {
    return std::abs(mu) <= mu_range_ && std::abs(pbar) <= p_range_;
}

cplx InfluenceTable::at(int mu, int pbar) const {
    if (!contains(mu, pbar)) {
        throw IndexError("influence table has no entry for (mu=" + std::to_string(mu) +
                         ", pbar=" + std::to_string(pbar) + ")");
    }
    const auto row = static_cast<std::size_t>(pbar + p_range_);
    const auto col = static_cast<std::size_t>(mu + mu_range_);
    return values_[row * static_cast<std::size_t>(2 * mu_range_ + 1) + col];
}

InfluenceTable build_influence_table(const BathSpec& spec, int n_sites, int mu_range, int p_range) {
    spec.validate();
    if (n_sites < 1 || mu_range < 0 || p_range < 0) {
        throw ValidationError("build_influence_table: ranges must be non-negative");
    }
    std::vector<cplx> values;
    values.reserve(static_cast<std::size_t>(2 * mu_range + 1) * static_cast<std::size_t>(2 * p_range + 1));
    for (int pb = -p_range; pb <= p_range; ++pb) {
        for (int mu = -mu_range; mu <= mu_range; ++mu) {
            values.push_back(influence(spec, static_cast<long long>(n_sites) * pb + mu));
        }
    }
    return InfluenceTable(n_sites, mu_range, p_range, std::move(values));
}

}  // namespace ringdeco
