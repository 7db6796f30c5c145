#include "ringdeco/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "ringdeco/reduced.hpp"

namespace ringdeco {
namespace {

constexpr double kGuardTol = 1e-8;
// Beyond this many Bessel orders a run would take hours; refuse instead.
constexpr long long kMaxWindingOrders = 2'000'000;

void guard(const DensityMatrix& rho, double t) {
    const DensityDiagnostics d = diagnose(rho);
    if (d.trace_error > kGuardTol || d.hermiticity_error > kGuardTol || d.min_eigenvalue < -kGuardTol) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "evolved state at t=%g violates invariants (trace %.3g, hermiticity %.3g, min eig %.3g)", t,
                      d.trace_error, d.hermiticity_error, d.min_eigenvalue);
        throw NumericalGuardError(buf);
    }
}

bool wants(const RunConfig& cfg, Observable o) {
    for (Observable x : cfg.observables) {
        if (x == o) return true;
    }
    return false;
}

std::vector<DensityMatrix> evolve(const RunConfig& cfg, const TimeGrid& grid) {
    const DensityMatrix rho_in = cfg.initial_density();
    if (!cfg.bath || cfg.bath->trivial()) return density_free(cfg.ring, rho_in, grid, cfg.sum_form, cfg.tolerance);
    ReducedOptions opts;
    opts.tol = cfg.tolerance;
    opts.naive_double_sum = cfg.sum_form == SumForm::kDouble;
    return density_reduced(cfg.ring, *cfg.bath, rho_in, grid, opts);
}

std::string csv_number(double v) { return format_double(v); }

}  // namespace

RunResult compute(const RunConfig& cfg) {
    cfg.validate();
    const TimeGrid grid = cfg.grid();
    const int n = cfg.ring.n_sites;
    RunResult out;
    const double t_last = grid.times.empty() ? 0.0 : grid.times.back();
    out.truncation = free_truncation(cfg.ring, t_last, cfg.tolerance);
    if (static_cast<long long>(out.truncation.p_max) * n > kMaxWindingOrders) {
        throw NumericalGuardError("winding truncation needs " + std::to_string(out.truncation.p_max) +
                                  " windings at t=" + format_double(t_last) + "; reduce grid.tmax");
    }

    const auto* packet = std::get_if<WavepacketSpec>(&cfg.initial);
    std::vector<DensityMatrix> states;
    std::vector<Eigen::VectorXd> packet_probs;
    if (packet != nullptr && wants(cfg, Observable::kProb)) {
        WavepacketOptions wo;
        wo.tol = cfg.tolerance;
        wo.use_propagator = cfg.wavepacket_via_propagator;
        packet_probs = wavepacket_series(cfg.ring, cfg.bath.value_or(BathSpec::none()), *packet, grid, wo);
    }
    // wave-packet probabilities alone come from the dedicated route
    const bool packet_prob_only = packet != nullptr && cfg.observables.size() == 1 &&
                                  cfg.observables.front() == Observable::kProb;
    if (!packet_prob_only) {
        states = evolve(cfg, grid);
        for (std::size_t i = 0; i < states.size(); ++i) guard(states[i], grid.times[i]);
    }
    std::vector<Eigen::VectorXd> currents;
    if (wants(cfg, Observable::kCurrent)) {
        currents.resize(grid.size());
        if (!cfg.bath || cfg.bath->trivial()) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                currents[i].resize(n);
                for (int j = 0; j < n; ++j) currents[i](j) = bond_current(cfg.ring, states[i].matrix(), j);
            }
        } else {
            const DensityMatrix rho_in = cfg.initial_density();
#pragma omp parallel for schedule(dynamic)
            for (long long i = 0; i < static_cast<long long>(grid.size()); ++i) {
                const auto idx = static_cast<std::size_t>(i);
                ReducedOptions opts;
                opts.tol = cfg.tolerance;
                currents[idx] = currents_reduced(cfg.ring, *cfg.bath, rho_in, grid.times[idx], opts);
            }
        }
    }

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.times[i];
        for (Observable o : cfg.observables) {
            switch (o) {
                case Observable::kProb: {
                    Eigen::VectorXd p = packet_probs.empty() ? states[i].diagonal() : packet_probs[i];
                    for (int j = 0; j < n; ++j) out.rows.push_back({t, "prob", std::to_string(j), p(j)});
                    out.rows.push_back({t, "prob_total", "all", p.sum()});
                    break;
                }
                case Observable::kCurrent:
                    for (int j = 0; j < n; ++j) {
                        out.rows.push_back({t, "current", std::to_string(j) + "-" + std::to_string(wrap_site(j + 1, n)),
                                            currents[i](j)});
                    }
                    break;
                case Observable::kDensity:
                    for (int j = 0; j < n; ++j) {
                        for (int jp = 0; jp < n; ++jp) {
                            out.rows.push_back({t, "density", std::to_string(j) + ":" + std::to_string(jp),
                                                states[i](j, jp)});
                        }
                    }
                    break;
                case Observable::kMomentum: {
                    const Eigen::VectorXd occ = momentum_occupations(states[i]);
                    for (int m = 0; m < n; ++m) out.rows.push_back({t, "momentum", std::to_string(m), occ(m)});
                    break;
                }
            }
        }
    }
    return out;
}

std::string render(const RunConfig& cfg, const RunResult& result) {
    const std::string config_text = serialize_config(cfg);
    const double hop = cfg.ring.hop;
    if (cfg.format == OutputFormat::kJson) {
        nlohmann::ordered_json doc;
        doc["metadata"] = {{"version", kVersion},
                           {"config", config_text},
                           {"p_max", result.truncation.p_max},
                           {"tail_bound", result.truncation.tail_bound}};
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const Row& r : result.rows) {
            rows.push_back({{"t", r.t},
                            {"delta0_t", hop * r.t},
                            {"observable", r.observable},
                            {"index", r.index},
                            {"value_re", r.value.real()},
                            {"value_im", r.value.imag()}});
        }
        doc["rows"] = rows;
        return doc.dump(1) + "\n";
    }
    std::ostringstream out;
    out << "# ringdeco " << kVersion << "\n";
    out << "# p_max = " << result.truncation.p_max << "\n";
    out << "# tail_bound = " << format_double(result.truncation.tail_bound) << "\n";
    out << "# config (rerun with --config on this file):\n";
    std::istringstream lines(config_text);
    for (std::string line; std::getline(lines, line);) out << "#! " << line << "\n";
    out << "t,delta0_t,observable,index,value_re,value_im\n";
    for (const Row& r : result.rows) {
        out << csv_number(r.t) << ',' << csv_number(hop * r.t) << ',' << r.observable << ',' << r.index << ','
            << csv_number(r.value.real()) << ',' << csv_number(r.value.imag()) << '\n';
    }
    return out.str();
}

void write_atomic(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".partial";
    try {
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f) throw ValidationError("cannot open '" + tmp + "' for writing");
            f << text;
            f.flush();
            if (!f) throw NumericalGuardError("failed writing '" + tmp + "'");
        }
        std::filesystem::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

RunResult run(const RunConfig& cfg) {
    RunResult result = compute(cfg);
    if (!cfg.output_path.empty()) write_atomic(cfg.output_path, render(cfg, result));
    return result;
}

namespace {

// probability rows as a (time x site) matrix
Eigen::MatrixXd prob_matrix(const RunResult& r, int n, std::size_t steps) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(steps), n);
    std::size_t row = 0;
    int site = 0;
    for (const Row& x : r.rows) {
        if (x.observable != "prob") continue;
        p(static_cast<Eigen::Index>(row), site) = x.value.real();
        if (++site == n) {
            site = 0;
            ++row;
        }
    }
    return p;
}

RunConfig prob_only(RunConfig cfg) {
    cfg.observables = {Observable::kProb};
    return cfg;
}

}  // namespace

SweepSummary sweep(const SweepSpec& spec) {
    spec.validate();
    namespace fs = std::filesystem;
    const std::string dir = spec.out_dir.empty() ? std::string(".") : spec.out_dir;
    fs::create_directories(dir);
    SweepSummary summary;
    const std::string axis(to_string(spec.axis));
    std::ostringstream combined;
    combined << "# ringdeco " << kVersion << " sweep over " << axis << "\n";
    {
        std::istringstream lines(serialize_config(spec.base));
        for (std::string line; std::getline(lines, line);) combined << "#! " << line << "\n";
    }
    combined << "sweep_axis,sweep_value,t,delta0_t,observable,index,value_re,value_im\n";

    Eigen::MatrixXd lo;
    Eigen::MatrixXd hi;
    for (double value : spec.values) {
        RunConfig cfg = spec.at(value);
        cfg.format = OutputFormat::kCsv;
        const std::string name = axis + "=" + format_double(value) + ".csv";
        cfg.output_path = (fs::path(dir) / name).string();
        const RunResult result = run(cfg);
        summary.files.push_back(cfg.output_path);

        const std::string body = render(cfg, result);
        std::istringstream lines(body);
        bool in_rows = false;
        for (std::string line; std::getline(lines, line);) {
            if (line.empty() || line[0] == '#') continue;
            if (!in_rows) {
                in_rows = true;  // skip the column header
                continue;
            }
            combined << axis << ',' << format_double(value) << ',' << line << '\n';
        }

        const std::size_t steps = cfg.grid().size();
        const Eigen::MatrixXd p = prob_matrix(compute(prob_only(spec.at(value))), cfg.ring.n_sites, steps);
        if (lo.size() == 0) {
            lo = p;
            hi = p;
        } else {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }

        if (spec.axis == SweepAxis::kLambda) {
            Eigen::MatrixXd flo;
            Eigen::MatrixXd fhi;
            for (int f = 0; f < 8; ++f) {
                RunConfig probe = prob_only(spec.at(value));
                probe.ring.flux = 2.0 * std::numbers::pi * f / 8;
                const Eigen::MatrixXd q = prob_matrix(compute(probe), probe.ring.n_sites, steps);
                if (f == 0) {
                    flo = q;
                    fhi = q;
                } else {
                    flo = flo.cwiseMin(q);
                    fhi = fhi.cwiseMax(q);
                }
            }
            summary.flux_sensitivity.push_back((fhi - flo).maxCoeff());
        }
    }
    summary.cross_value_deviation = lo.size() == 0 ? 0.0 : (hi - lo).maxCoeff();

    const std::string combined_path = (fs::path(dir) / "combined.csv").string();
    write_atomic(combined_path, combined.str());
    summary.files.push_back(combined_path);

    nlohmann::ordered_json doc;
    doc["version"] = kVersion;
    doc["axis"] = axis;
    doc["values"] = spec.values;
    doc["cross_value_deviation"] = summary.cross_value_deviation;
    if (!summary.flux_sensitivity.empty()) doc["flux_sensitivity"] = summary.flux_sensitivity;
    doc["files"] = summary.files;
    const std::string summary_path = (fs::path(dir) / "summary.json").string();
    write_atomic(summary_path, doc.dump(2) + "\n");
    summary.files.push_back(summary_path);
    return summary;
}

}  // namespace ringdeco
