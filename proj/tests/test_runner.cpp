#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "ringdeco/error.hpp"
#include "ringdeco/runner.hpp"

using namespace ringdeco;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

RunConfig three_site(int start) {
    RunConfig cfg;
    cfg.ring = {3, 1.0, 0.0};
    cfg.initial = SiteStart{start};
    cfg.t_max = 10.0;
    cfg.steps = 50;
    return cfg;
}

}  // namespace

TEST_SUITE("runner") {
    TEST_CASE("free three-site run starting on site 1") {
        const RunResult r = compute(three_site(1));
        bool first = true;
        double min_total = 2.0;
        double max_total = 0.0;
        double p1_min = 1.0;
        for (const Row& row : r.rows) {
            if (row.observable == "prob" && row.index == "1") {
                if (first) CHECK(row.value.real() == doctest::Approx(1.0));
                first = false;
                p1_min = std::min(p1_min, row.value.real());
            }
            if (row.observable == "prob_total") {
                min_total = std::min(min_total, row.value.real());
                max_total = std::max(max_total, row.value.real());
            }
        }
        CHECK(std::abs(min_total - 1.0) < 1e-10);
        CHECK(std::abs(max_total - 1.0) < 1e-10);
        CHECK(p1_min < 0.5);
    }

    TEST_CASE("CSV layout and header") {
        RunConfig cfg = three_site(0);
        cfg.observables = {Observable::kProb, Observable::kCurrent, Observable::kDensity, Observable::kMomentum};
        cfg.steps = 2;
        const std::string text = render(cfg, compute(cfg));
        CHECK(text.rfind("# ringdeco 1.0.0\n", 0) == 0);
        CHECK(text.find("# p_max = ") != std::string::npos);
        CHECK(text.find("# tail_bound = ") != std::string::npos);
        CHECK(text.find("\nt,delta0_t,observable,index,value_re,value_im\n") != std::string::npos);
        CHECK(text.find("\n0,0,prob,0,1,0\n") != std::string::npos);
        CHECK(text.find(",current,2-0,") != std::string::npos);
        CHECK(text.find(",density,1:2,") != std::string::npos);
        CHECK(text.find(",momentum,2,") != std::string::npos);
    }

    TEST_CASE("JSON output is parseable") {
        RunConfig cfg = three_site(0);
        cfg.format = OutputFormat::kJson;
        cfg.steps = 3;
        const auto doc = nlohmann::json::parse(render(cfg, compute(cfg)));
        CHECK(doc["metadata"]["version"] == "1.0.0");
        CHECK(doc["rows"].size() == 4 * 4);
        CHECK(doc["rows"][0]["value_re"].get<double>() == 1.0);
    }

    TEST_CASE("identical configs give byte-identical files") {
        TempDir dir("ringdeco_runner_det");
        RunConfig cfg = three_site(0);
        cfg.bath = BathSpec::gaussian(0.02);
        cfg.observables = {Observable::kProb, Observable::kCurrent};
        cfg.seed = 5;
        cfg.output_path = (dir.path / "a.csv").string();
        run(cfg);
        cfg.output_path = (dir.path / "b.csv").string();
        run(cfg);
        const std::string a = slurp(dir.path / "a.csv");
        const std::string b = slurp(dir.path / "b.csv");
        // only the recorded output path differs
        CHECK(a.size() == b.size());
        std::size_t diffs = 0;
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) diffs += a[i] != b[i];
        CHECK(diffs == 1);
    }

    TEST_CASE("an output file suffices to rerun the computation") {
        TempDir dir("ringdeco_runner_rerun");
        for (OutputFormat fmt : {OutputFormat::kCsv, OutputFormat::kJson}) {
            RunConfig cfg = three_site(2);
            cfg.ring.flux = 0.4;
            cfg.bath = BathSpec::fixed({0.3, 0.2});
            cfg.observables = {Observable::kProb, Observable::kDensity};
            cfg.format = fmt;
            cfg.output_path = (dir.path / (fmt == OutputFormat::kCsv ? "r.csv" : "r.json")).string();
            run(cfg);
            const std::string first = slurp(cfg.output_path);
            const RunConfig again = load_config(cfg.output_path);
            CHECK(again == cfg);
            run(again);
            CHECK(slurp(cfg.output_path) == first);
        }
    }

    TEST_CASE("failed writes leave no partial file") {
        TempDir dir("ringdeco_runner_fail");
        RunConfig cfg = three_site(0);
        cfg.output_path = (dir.path / "missing_dir" / "x.csv").string();
        CHECK_THROWS(run(cfg));
        CHECK_FALSE(fs::exists(dir.path / "missing_dir" / "x.csv.partial"));
        CHECK_FALSE(fs::exists(cfg.output_path));
    }

    TEST_CASE("oversized truncations trip the guard before any output") {
        TempDir dir("ringdeco_runner_guard");
        RunConfig cfg = three_site(0);
        cfg.t_max = 1e9;
        cfg.output_path = (dir.path / "g.csv").string();
        CHECK_THROWS_AS(run(cfg), NumericalGuardError);
        CHECK_FALSE(fs::exists(cfg.output_path));
        CHECK_FALSE(fs::exists(cfg.output_path + ".partial"));
    }

    TEST_CASE("an empty bath reproduces the free run bitwise") {
        RunConfig free = three_site(0);
        free.observables = {Observable::kProb, Observable::kCurrent, Observable::kDensity};
        RunConfig empty = free;
        empty.bath = BathSpec::fixed({});
        RunConfig zero = free;
        zero.bath = BathSpec::gaussian(0.0);
        const RunResult a = compute(free);
        for (const RunConfig& other : {empty, zero}) {
            const RunResult b = compute(other);
            REQUIRE(a.rows.size() == b.rows.size());
            bool same = true;
            for (std::size_t i = 0; i < a.rows.size(); ++i) same = same && a.rows[i].value == b.rows[i].value;
            CHECK(same);
        }
    }

    TEST_CASE("flux sweep at strong decoherence") {
        TempDir dir("ringdeco_runner_flux");
        SweepSpec spec;
        spec.base = three_site(0);
        spec.base.bath = BathSpec::gaussian(5.0);
        spec.base.t_max = 20.0;
        spec.base.steps = 40;
        spec.axis = SweepAxis::kFlux;
        for (int i = 0; i < 8; ++i) spec.values.push_back(i * std::numbers::pi / 8);
        spec.out_dir = dir.path.string();
        const SweepSummary s = sweep(spec);
        CHECK(s.cross_value_deviation < 1e-6);
        CHECK(s.files.size() == 10);  // per-value files, combined.csv and summary.json
        CHECK(fs::exists(dir.path / "flux=0.csv"));
        CHECK(fs::exists(dir.path / "combined.csv"));
        CHECK(fs::exists(dir.path / "summary.json"));
        const std::string combined = slurp(dir.path / "combined.csv");
        CHECK(combined.find("sweep_axis,sweep_value,t,delta0_t,observable,index,value_re,value_im\n") != std::string::npos);
        CHECK(combined.find("\nflux,0,0,0,prob,0,1,0\n") != std::string::npos);
    }

    TEST_CASE("lambda sweep suppresses the flux sensitivity monotonically") {
        TempDir dir("ringdeco_runner_lambda");
        SweepSpec spec;
        spec.base = three_site(0);
        spec.base.t_max = 20.0;
        spec.base.steps = 40;
        spec.axis = SweepAxis::kLambda;
        spec.values = {0.0, 0.02, 0.1, 0.5};
        spec.out_dir = dir.path.string();
        const SweepSummary s = sweep(spec);
        REQUIRE(s.flux_sensitivity.size() == 4);
        for (std::size_t i = 1; i < 4; ++i) CHECK(s.flux_sensitivity[i] < s.flux_sensitivity[i - 1]);
        const auto summary = nlohmann::json::parse(slurp(dir.path / "summary.json"));
        CHECK(summary["flux_sensitivity"].size() == 4);
    }

    TEST_CASE("wave-packet run") {
        RunConfig cfg;
        cfg.ring = {24, 1.0, 0.3};
        cfg.initial = WavepacketSpec{24, 4.0, 12, std::numbers::pi / 2, true};
        cfg.bath = BathSpec::gaussian(0.2);
        cfg.t_max = 4.0;
        cfg.steps = 4;
        const RunResult pairs = compute(cfg);
        cfg.wavepacket_via_propagator = true;
        const RunResult prop = compute(cfg);
        REQUIRE(pairs.rows.size() == prop.rows.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < pairs.rows.size(); ++i) worst = std::max(worst, std::abs(pairs.rows[i].value - prop.rows[i].value));
        CHECK(worst < 1e-10);
        cfg.observables = {Observable::kProb, Observable::kMomentum};
        CHECK(compute(cfg).rows.size() == 5 * (24 + 1 + 24));
    }
}
