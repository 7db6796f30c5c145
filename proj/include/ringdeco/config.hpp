#pragma once

// Run configuration and its flat "dotted.key = value" text form.
//
//   # comments run to end of line
//   ring.sites = 3
//   bath.kind = gaussian
//   bath.lambda = 0.02
//
// Unknown keys and malformed values are reported with their line number.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ringdeco/bath.hpp"
#include "ringdeco/error.hpp"
#include "ringdeco/ring.hpp"
#include "ringdeco/wavepacket.hpp"

namespace ringdeco {

class ConfigError : public ValidationError {
public:
    ConfigError(int line, std::string field, const std::string& message);
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

enum class Observable { kProb, kCurrent, kDensity, kMomentum };
Observable parse_observable(std::string_view text);
std::string_view to_string(Observable o);

enum class OutputFormat { kCsv, kJson };

struct SiteStart {
    int site = 0;
    bool operator==(const SiteStart&) const = default;
};

struct MatrixStart {
    Eigen::MatrixXcd matrix;
    bool operator==(const MatrixStart& o) const {
        return matrix.rows() == o.matrix.rows() && matrix.cols() == o.matrix.cols() && matrix == o.matrix;
    }
};

using InitialSpec = std::variant<SiteStart, WavepacketSpec, MatrixStart>;

struct RunConfig {
    RingConfig ring;
    std::optional<BathSpec> bath;
    InitialSpec initial = SiteStart{};
    double t_max = 10.0;
    int steps = 100;
    std::vector<double> times;  // overrides t_max/steps when non-empty
    std::vector<Observable> observables{Observable::kProb};
    SumForm sum_form = SumForm::kAuto;
    double tolerance = kDefaultTruncationTol;
    std::uint64_t seed = 0;
    OutputFormat format = OutputFormat::kCsv;
    std::string output_path;
    /// Evaluate wave-packet probabilities through the reduced propagator.
    bool wavepacket_via_propagator = false;

    void validate() const;
    TimeGrid grid() const;
    DensityMatrix initial_density() const;
    bool operator==(const RunConfig&) const = default;
};

enum class SweepAxis { kFlux, kLambda, kWidth };
SweepAxis parse_sweep_axis(std::string_view text);
std::string_view to_string(SweepAxis axis);

struct SweepSpec {
    SweepAxis axis = SweepAxis::kFlux;
    std::vector<double> values;
    RunConfig base;
    std::string out_dir;

    void validate() const;
    /// base with the axis set to value; the output path is left empty.
    RunConfig at(double value) const;
};

/// Parse text; `source` names the input in diagnostics.
RunConfig parse_config(std::string_view text, std::string_view source = "config");
/// Read a config file, or the embedded config of a previous output file.
RunConfig load_config(const std::string& path);
/// Apply one key/value pair (used by the parser and by CLI overrides).
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, int line = 0);
std::string serialize_config(const RunConfig& cfg);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);
std::vector<double> parse_double_list(std::string_view text, std::string_view field, int line = 0);

}  // namespace ringdeco
