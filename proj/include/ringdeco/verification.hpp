#pragma once

// Acceptance suite: oracle equivalence, property and runtime checks.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ringdeco {

enum class VerifyLevel { kQuick, kFull };
VerifyLevel parse_verify_level(std::string_view text);
std::string_view to_string(VerifyLevel level);

struct VerifyOptions {
    VerifyLevel level = VerifyLevel::kFull;
    std::uint64_t seed = 20231015;
    bool mutate_influence = false;
};

struct CheckResult {
    int id = 0;
    std::string name;
    double tolerance = 0.0;
    double observed = 0.0;
    double seconds = 0.0;
    double time_limit = 0.0;  // 0 = none
    bool passed = false;
    std::string detail;
};

inline constexpr int kCriteriaCount = 11;

/// One criterion. Criterion 6 re-runs 1-5 to collect their diagnostics.
CheckResult run_criterion(int id, const VerifyOptions& opts);

/// Every criterion the level includes, in order. Quick skips the
/// Monte-Carlo ensemble check.
std::vector<CheckResult> run_acceptance(const VerifyOptions& opts);

/// One line per check: "[PASS] 1 name: observed=... tol=... (1.2 s)".
std::string format_line(const CheckResult& r);
/// {"level":..., "passed":..., "checks":[...]}.
std::string report_json(const std::vector<CheckResult>& results, const VerifyOptions& opts);

}  // namespace ringdeco
