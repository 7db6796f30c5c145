// Command-line front end: free / evolve / current / wavepacket / sweep / verify.
//
// Exit codes: 0 success, 1 invalid input, 2 numerical guard, 3 verification failure.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ringdeco/config.hpp"
#include "ringdeco/error.hpp"
#include "ringdeco/runner.hpp"
#include "ringdeco/verification.hpp"

namespace {

using namespace ringdeco;

constexpr int kExitValidation = 1;
constexpr int kExitGuard = 2;
constexpr int kExitVerify = 3;

// Flags that map onto config keys; only flags given on the command line
// override the config file.
struct RunFlags {
    std::string config;
    std::map<std::string, std::string> settings;

    void bind(CLI::App& app, bool with_bath) {
        app.add_option("--config", config, "config file, or a previous output file to rerun");
        bind_key(app, "--sites", "ring.sites", "number of ring sites N (>= 3)");
        bind_key(app, "--hop", "ring.hop", "hopping energy Delta0 (hbar = 1)");
        bind_key(app, "--flux", "ring.flux", "Aharonov-Bohm flux Phi in radians");
        if (with_bath) {
            auto* lambda = bind_key(app, "--lambda", "bath.lambda", "Gaussian-ensemble decoherence parameter");
            auto* alphas = bind_key(app, "--alphas", "bath.alphas", "fixed couplings a1,a2,... (radians per link)");
            bind_key(app, "--polarizations", "bath.polarizations", "spin polarisations m1,m2,... in [-1, 1]")
                ->needs(alphas);
            lambda->excludes(alphas);
        }
        auto* site = bind_key(app, "--initial-site", "initial.site", "start on this site");
        app.add_option("--wavepacket-file", wavepacket_file, "config file with wavepacket.* keys")
            ->excludes(site);
        bind_key(app, "--tmax", "grid.tmax", "final time");
        bind_key(app, "--steps", "grid.steps", "number of time steps");
        bind_key(app, "--form", "sum_form", "winding sum form: single|double|auto");
        bind_key(app, "--tol", "tolerance", "truncation tolerance");
        bind_key(app, "--seed", "seed", "random seed recorded in the output");
        bind_key(app, "--out", "output.path", "output file (stdout when omitted)");
        bind_key(app, "--format", "output.format", "csv|json");
        bind_key(app, "--observables", "observables", "comma list of prob,current,density,momentum");
    }

    CLI::Option* bind_key(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help) {
        return app.add_option_function<std::string>(
            flag, [this, key](const std::string& v) { settings[key] = v; }, help);
    }

    RunConfig build(const std::map<std::string, std::string>& defaults) const {
        RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
        if (config.empty()) {
            // the ring size decides default-dependent values such as the packet offset
            const auto sites = settings.find("ring.sites");
            const auto default_sites = defaults.find("ring.sites");
            if (sites != settings.end()) {
                apply_setting(cfg, "ring.sites", sites->second);
            } else if (default_sites != defaults.end()) {
                apply_setting(cfg, "ring.sites", default_sites->second);
            }
            for (const auto& [k, v] : defaults) {
                if (k != "ring.sites") apply_setting(cfg, k, v);
            }
        }
        if (!wavepacket_file.empty()) apply_wavepacket_file(cfg);
        // sites first so dependent keys see the final ring size
        if (auto it = settings.find("ring.sites"); it != settings.end()) apply_setting(cfg, it->first, it->second);
        for (const auto& [k, v] : settings) {
            if (k != "ring.sites") apply_setting(cfg, k, v);
        }
        cfg.validate();
        return cfg;
    }

    void apply_wavepacket_file(RunConfig& cfg) const {
        std::FILE* f = std::fopen(wavepacket_file.c_str(), "rb");
        if (f == nullptr) throw ValidationError("cannot open wave-packet file '" + wavepacket_file + "'");
        std::string text;
        char buf[4096];
        for (std::size_t got; (got = std::fread(buf, 1, sizeof buf, f)) > 0;) text.append(buf, got);
        std::fclose(f);
        apply_setting(cfg, "initial.kind", "wavepacket");
        int line_no = 0;
        std::size_t pos = 0;
        while (pos < text.size()) {
            auto end = text.find('\n', pos);
            if (end == std::string::npos) end = text.size();
            std::string line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            const auto eq = line.find('=');
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            if (eq == std::string::npos) throw ConfigError(line_no, wavepacket_file, "expected 'key = value'");
            auto strip = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                const auto b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            std::string key = strip(line.substr(0, eq));
            if (key.rfind("wavepacket.", 0) != 0 && key != "ring.sites") {
                throw ConfigError(line_no, key, "wave-packet files may only set wavepacket.* keys and ring.sites");
            }
            apply_setting(cfg, key, strip(line.substr(eq + 1)), line_no);
        }
    }

    std::string wavepacket_file;
};

int emit(const RunConfig& cfg) {
    const RunResult result = run(cfg);
    if (cfg.output_path.empty()) std::cout << render(cfg, result);
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Exact dynamics of a particle on a flux-threaded ring coupled to a spin bath"};
    app.require_subcommand(1);

    RunFlags free_flags;
    auto* free_cmd = app.add_subcommand("free", "bath-free evolution");
    free_flags.bind(*free_cmd, false);

    RunFlags evolve_flags;
    auto* evolve_cmd = app.add_subcommand("evolve", "evolution with the spin bath traced out");
    evolve_flags.bind(*evolve_cmd, true);

    RunFlags current_flags;
    auto* current_cmd = app.add_subcommand("current", "bond currents, with or without a bath");
    current_flags.bind(*current_cmd, true);

    RunFlags packet_flags;
    auto* packet_cmd = app.add_subcommand("wavepacket", "two colliding Gaussian wave packets");
    packet_flags.bind(*packet_cmd, true);
    packet_flags.bind_key(*packet_cmd, "--width", "wavepacket.width", "Gaussian width D in momentum^-2");
    packet_flags.bind_key(*packet_cmd, "--offset", "wavepacket.offset", "centre site of the first packet");
    packet_flags.bind_key(*packet_cmd, "--k-center", "wavepacket.k_center", "central momentum");
    packet_flags.bind_key(*packet_cmd, "--route", "wavepacket.route", "pairs|propagator");

    RunFlags sweep_flags;
    auto* sweep_cmd = app.add_subcommand("sweep", "repeat a run over flux, lambda or width values");
    sweep_flags.bind(*sweep_cmd, true);
    std::string axis = "flux";
    std::string values;
    sweep_cmd->add_option("--axis", axis, "flux|lambda|width")->capture_default_str();
    sweep_cmd->add_option("--values", values, "comma-separated axis values")->required();
    sweep_flags.bind_key(*sweep_cmd, "--width", "wavepacket.width", "wave-packet width D");

    auto* verify_cmd = app.add_subcommand("verify", "run the acceptance checks against the oracles");
    std::string level = "quick";
    std::string report_path;
    std::uint64_t seed = VerifyOptions{}.seed;
    bool mutate = false;
    int only = 0;
    verify_cmd->add_option("--level", level, "quick|full")->capture_default_str();
    verify_cmd->add_option("--out", report_path, "JSON report path (stdout when omitted)");
    verify_cmd->add_option("--seed", seed, "seed for random states and Monte-Carlo")->capture_default_str();
    verify_cmd->add_option("--only", only, "run a single criterion (1-11)");
    verify_cmd->add_flag("--mutate-influence", mutate, "break the influence symmetry (canary)")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    const std::map<std::string, std::string> site_defaults{{"initial.site", "0"}};
    if (*free_cmd) return emit(free_flags.build(site_defaults));
    if (*evolve_cmd) {
        RunConfig cfg = evolve_flags.build(site_defaults);
        if (!cfg.bath) throw ValidationError("evolve needs a bath: give --lambda or --alphas");
        return emit(cfg);
    }
    if (*current_cmd) return emit(current_flags.build({{"initial.site", "0"}, {"observables", "current"}}));
    if (*packet_cmd) {
        std::map<std::string, std::string> defaults{{"ring.sites", "100"}, {"initial.kind", "wavepacket"},
                                                    {"grid.tmax", "20"},
                                                    {"grid.steps", "40"}};
        RunConfig cfg = packet_flags.build(defaults);
        if (!std::holds_alternative<WavepacketSpec>(cfg.initial)) {
            throw ValidationError("wavepacket needs a wave-packet initial state");
        }
        return emit(cfg);
    }
    if (*sweep_cmd) {
        SweepSpec spec;
        spec.axis = parse_sweep_axis(axis);
        spec.values = parse_double_list(values, "--values");
        auto settings = sweep_flags.settings;
        auto out = settings.find("output.path");
        if (out != settings.end()) {
            spec.out_dir = out->second;
            sweep_flags.settings.erase("output.path");
        }
        spec.base = sweep_flags.build(site_defaults);
        const SweepSummary summary = sweep(spec);
        std::printf("cross-value deviation of P_j: %.6g\n", summary.cross_value_deviation);
        for (std::size_t i = 0; i < summary.flux_sensitivity.size(); ++i) {
            std::printf("flux sensitivity at %s = %s: %.6g\n", axis.c_str(),
                        format_double(spec.values[i]).c_str(), summary.flux_sensitivity[i]);
        }
        for (const auto& f : summary.files) std::printf("wrote %s\n", f.c_str());
        return 0;
    }
    if (*verify_cmd) {
        VerifyOptions opts;
        opts.level = parse_verify_level(level);
        opts.seed = seed;
        opts.mutate_influence = mutate;
        std::vector<CheckResult> results;
        if (only != 0) {
            results.push_back(run_criterion(only, opts));
        } else {
            results = run_acceptance(opts);
        }
        bool ok = true;
        for (const CheckResult& r : results) {
            std::fprintf(stderr, "%s\n", format_line(r).c_str());
            ok = ok && r.passed;
        }
        const std::string report = report_json(results, opts);
        if (report_path.empty()) {
            std::cout << report << "\n";
        } else {
            write_atomic(report_path, report + "\n");
        }
        return ok ? 0 : kExitVerify;
    }
    return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ringdeco::NumericalGuardError& e) {
        std::fprintf(stderr, "numerical guard: %s\n", e.what());
        return kExitGuard;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitValidation;
    } catch (const std::logic_error& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitGuard;
    }
}
