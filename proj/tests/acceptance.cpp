// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ringdeco/verification.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ringdeco acceptance criteria"};
    std::vector<int> only;
    std::string level = "full";
    std::uint64_t seed = ringdeco::VerifyOptions{}.seed;
    app.add_option("--only", only, "criteria to run (default: all)")->check(CLI::Range(1, ringdeco::kCriteriaCount));
    app.add_option("--level", level, "quick|full")->capture_default_str();
    app.add_option("--seed", seed, "seed for random states and sampling")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    ringdeco::VerifyOptions opts;
    try {
        opts.level = ringdeco::parse_verify_level(level);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
    opts.seed = seed;

    std::vector<ringdeco::CheckResult> results;
    if (only.empty()) {
        results = ringdeco::run_acceptance(opts);
    } else {
        for (int id : only) results.push_back(ringdeco::run_criterion(id, opts));
    }
    int failed = 0;
    for (const auto& r : results) {
        std::printf("%s\n", ringdeco::format_line(r).c_str());
        failed += r.passed ? 0 : 1;
    }
    std::printf("%zu criteria, %d failed\n", results.size(), failed);
    return failed == 0 ? 0 : 1;
}
