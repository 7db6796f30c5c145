#pragma once

// Experiment orchestration: single runs and parameter sweeps written as
// long-format CSV or JSON with a self-describing header.

#include <string>
#include <vector>

#include "ringdeco/config.hpp"

namespace ringdeco {

inline constexpr const char* kVersion = "1.0.0";

struct Row {
    double t = 0.0;
    std::string observable;
    std::string index;
    cplx value;
};

struct RunResult {
    std::vector<Row> rows;
    WindingTruncation truncation;  // at the largest grid time
};

/// Evaluate every requested observable on the grid. Throws
/// NumericalGuardError if an evolved state breaks the density-matrix
/// invariants.
RunResult compute(const RunConfig& cfg);

/// Render rows plus metadata in cfg.format.
std::string render(const RunConfig& cfg, const RunResult& result);

/// compute + render + atomic write to cfg.output_path (stdout when empty
/// is handled by the caller). Partial files are removed on failure.
RunResult run(const RunConfig& cfg);

struct SweepSummary {
    std::vector<std::string> files;
    /// max over (t, site) of the spread of P_j(t) across sweep values
    double cross_value_deviation = 0.0;
    /// lambda sweeps: per value, the spread of P_j(t) over 8 probe fluxes
    std::vector<double> flux_sensitivity;
};

SweepSummary sweep(const SweepSpec& spec);

/// Write text to path through a temporary file and rename.
void write_atomic(const std::string& path, const std::string& text);

}  // namespace ringdeco
