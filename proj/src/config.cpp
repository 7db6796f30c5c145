#include "ringdeco/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ringdeco {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text, std::string_view field, int line) {
    const std::string_view t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(line, std::string(field), "expected a number, got '" + std::string(t) + "'");
    }
    if (!std::isfinite(v)) throw ConfigError(line, std::string(field), "value must be finite");
    return v;
}

template <typename Int>
Int parse_integer(std::string_view text, std::string_view field, int line) {
    const std::string_view t = trim(text);
    Int v{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(line, std::string(field), "expected an integer, got '" + std::string(t) + "'");
    }
    return v;
}

bool parse_bool(std::string_view text, std::string_view field, int line) {
    const std::string_view t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError(line, std::string(field), "expected true or false, got '" + std::string(t) + "'");
}

std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> out;
    text = trim(text);
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.push_back(trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_double(values[i]);
    }
    return out;
}

FixedCouplings& ensure_fixed(RunConfig& cfg) {
    if (!cfg.bath || !cfg.bath->is_fixed()) cfg.bath = BathSpec{FixedCouplings{}};
    return std::get<FixedCouplings>(cfg.bath->model);
}

WavepacketSpec& ensure_wavepacket(RunConfig& cfg) {
    if (!std::holds_alternative<WavepacketSpec>(cfg.initial)) {
        WavepacketSpec spec;
        spec.n_sites = cfg.ring.n_sites;
        spec.offset = cfg.ring.n_sites / 2;
        cfg.initial = spec;
    }
    return std::get<WavepacketSpec>(cfg.initial);
}

Eigen::MatrixXcd& ensure_matrix(RunConfig& cfg, Eigen::Index dim) {
    if (!std::holds_alternative<MatrixStart>(cfg.initial)) {
        cfg.initial = MatrixStart{Eigen::MatrixXcd::Zero(dim, dim)};
    }
    auto& m = std::get<MatrixStart>(cfg.initial).matrix;
    if (m.rows() != dim) {
        Eigen::MatrixXcd resized = Eigen::MatrixXcd::Zero(dim, dim);
        const Eigen::Index keep = std::min(dim, m.rows());
        resized.topLeftCorner(keep, keep) = m.topLeftCorner(keep, keep);
        m = resized;
    }
    return m;
}

void set_matrix_part(RunConfig& cfg, std::string_view value, bool imaginary, std::string_view key, int line) {
    const std::vector<double> v = parse_double_list(value, key, line);
    const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (dim == 0 || static_cast<std::size_t>(dim * dim) != v.size()) {
        throw ConfigError(line, std::string(key), "needs N*N row-major entries, got " + std::to_string(v.size()));
    }
    Eigen::MatrixXcd& m = ensure_matrix(cfg, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index k = 0; k < dim; ++k) {
            const double x = v[static_cast<std::size_t>(i * dim + k)];
            m(i, k) = imaginary ? cplx(m(i, k).real(), x) : cplx(x, m(i, k).imag());
        }
    }
}

}  // namespace

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : ValidationError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + field + ": " + message),
      line_(line),
      field_(std::move(field)) {}

Observable parse_observable(std::string_view text) {
    if (text == "prob") return Observable::kProb;
    if (text == "current") return Observable::kCurrent;
    if (text == "density") return Observable::kDensity;
    if (text == "momentum" || text == "momentum_occupations") return Observable::kMomentum;
    throw ValidationError("unknown observable '" + std::string(text) + "' (prob|current|density|momentum)");
}

std::string_view to_string(Observable o) {
    switch (o) {
        case Observable::kProb: return "prob";
        case Observable::kCurrent: return "current";
        case Observable::kDensity: return "density";
        case Observable::kMomentum: break;
    }
    return "momentum";
}

SweepAxis parse_sweep_axis(std::string_view text) {
    if (text == "flux") return SweepAxis::kFlux;
    if (text == "lambda") return SweepAxis::kLambda;
    if (text == "width") return SweepAxis::kWidth;
    throw ValidationError("sweep axis must be flux, lambda or width");
}

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::kFlux: return "flux";
        case SweepAxis::kLambda: return "lambda";
        case SweepAxis::kWidth: break;
    }
    return "width";
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

std::vector<double> parse_double_list(std::string_view text, std::string_view field, int line) {
    std::vector<double> out;
    for (std::string_view item : split_list(text)) out.push_back(parse_double(item, field, line));
    return out;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, int line) {
    const std::string k(key);
    if (key == "ring.sites") {
        cfg.ring.n_sites = parse_integer<int>(value, key, line);
        if (auto* wp = std::get_if<WavepacketSpec>(&cfg.initial)) wp->n_sites = cfg.ring.n_sites;
    } else if (key == "ring.hop") {
        cfg.ring.hop = parse_double(value, key, line);
    } else if (key == "ring.flux") {
        cfg.ring.flux = parse_double(value, key, line);
    } else if (key == "bath.kind") {
        const std::string_view kind = trim(value);
        if (kind == "none") {
            cfg.bath.reset();
        } else if (kind == "fixed") {
            ensure_fixed(cfg);
        } else if (kind == "gaussian") {
            if (!cfg.bath || !cfg.bath->is_gaussian()) cfg.bath = BathSpec{GaussianEnsemble{}};
        } else {
            throw ConfigError(line, k, "expected none, fixed or gaussian");
        }
    } else if (key == "bath.lambda") {
        cfg.bath = BathSpec{GaussianEnsemble{parse_double(value, key, line)}};
    } else if (key == "bath.alphas") {
        ensure_fixed(cfg).alphas = parse_double_list(value, key, line);
    } else if (key == "bath.polarizations") {
        ensure_fixed(cfg).polarizations = parse_double_list(value, key, line);
    } else if (key == "initial.kind") {
        const std::string_view kind = trim(value);
        if (kind == "site") {
            if (!std::holds_alternative<SiteStart>(cfg.initial)) cfg.initial = SiteStart{};
        } else if (kind == "wavepacket") {
            ensure_wavepacket(cfg);
        } else if (kind == "matrix") {
            ensure_matrix(cfg, cfg.ring.n_sites);
        } else {
            throw ConfigError(line, k, "expected site, wavepacket or matrix");
        }
    } else if (key == "initial.site") {
        cfg.initial = SiteStart{parse_integer<int>(value, key, line)};
    } else if (key == "initial.matrix.re") {
        set_matrix_part(cfg, value, false, key, line);
    } else if (key == "initial.matrix.im") {
        set_matrix_part(cfg, value, true, key, line);
    } else if (key == "wavepacket.width") {
        ensure_wavepacket(cfg).width = parse_double(value, key, line);
    } else if (key == "wavepacket.offset") {
        ensure_wavepacket(cfg).offset = parse_integer<int>(value, key, line);
    } else if (key == "wavepacket.k_center") {
        ensure_wavepacket(cfg).k_center = parse_double(value, key, line);
    } else if (key == "wavepacket.include_second") {
        ensure_wavepacket(cfg).include_second = parse_bool(value, key, line);
    } else if (key == "wavepacket.route") {
        const std::string_view route = trim(value);
        if (route != "pairs" && route != "propagator") throw ConfigError(line, k, "expected pairs or propagator");
        cfg.wavepacket_via_propagator = route == "propagator";
    } else if (key == "grid.tmax") {
        cfg.t_max = parse_double(value, key, line);
    } else if (key == "grid.steps") {
        cfg.steps = parse_integer<int>(value, key, line);
    } else if (key == "grid.times") {
        cfg.times = parse_double_list(value, key, line);
    } else if (key == "observables") {
        cfg.observables.clear();
        for (std::string_view item : split_list(value)) {
            try {
                cfg.observables.push_back(parse_observable(item));
            } catch (const ValidationError& e) {
                throw ConfigError(line, k, e.what());
            }
        }
    } else if (key == "sum_form") {
        try {
            cfg.sum_form = parse_sum_form(trim(value));
        } catch (const ValidationError& e) {
            throw ConfigError(line, k, e.what());
        }
    } else if (key == "tolerance") {
        cfg.tolerance = parse_double(value, key, line);
    } else if (key == "seed") {
        cfg.seed = parse_integer<std::uint64_t>(value, key, line);
    } else if (key == "output.format") {
        const std::string_view f = trim(value);
        if (f == "csv") {
            cfg.format = OutputFormat::kCsv;
        } else if (f == "json") {
            cfg.format = OutputFormat::kJson;
        } else {
            throw ConfigError(line, k, "expected csv or json");
        }
    } else if (key == "output.path") {
        cfg.output_path = std::string(trim(value));
    } else {
        throw ConfigError(line, k, "unknown key");
    }
}

RunConfig parse_config(std::string_view text, std::string_view source) {
    RunConfig cfg;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        ++line_no;
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(line_no, std::string(source), "expected 'key = value', got '" + std::string(line) + "'");
        }
        apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const std::string_view head = trim(text);
    if (!head.empty() && head.front() == '{') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
            return parse_config(doc.at("metadata").at("config").get<std::string>(), path);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("'" + path + "' is not a ringdeco JSON output: " + e.what());
        }
    }
    // an output file embeds its config on "#! " lines
    std::string embedded;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        if (line.rfind("#! ", 0) == 0) embedded += line.substr(3) + "\n";
    }
    return parse_config(embedded.empty() ? text : embedded, path);
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "# ring: sites, hopping energy (hbar = 1), flux in radians\n";
    out << "ring.sites = " << cfg.ring.n_sites << "\n";
    out << "ring.hop = " << format_double(cfg.ring.hop) << "\n";
    out << "ring.flux = " << format_double(cfg.ring.flux) << "\n";
    out << "# bath: none | fixed (couplings in radians per link) | gaussian (lambda)\n";
    if (!cfg.bath) {
        out << "bath.kind = none\n";
    } else if (const auto* f = std::get_if<FixedCouplings>(&cfg.bath->model)) {
        out << "bath.kind = fixed\n";
        out << "bath.alphas = " << join(f->alphas) << "\n";
        if (!f->polarizations.empty()) out << "bath.polarizations = " << join(f->polarizations) << "\n";
    } else {
        out << "bath.kind = gaussian\n";
        out << "bath.lambda = " << format_double(std::get<GaussianEnsemble>(cfg.bath->model).lambda) << "\n";
    }
    out << "# initial state\n";
    if (const auto* s = std::get_if<SiteStart>(&cfg.initial)) {
        out << "initial.kind = site\n";
        out << "initial.site = " << s->site << "\n";
    } else if (const auto* wp = std::get_if<WavepacketSpec>(&cfg.initial)) {
        out << "initial.kind = wavepacket\n";
        out << "wavepacket.width = " << format_double(wp->width) << "\n";
        out << "wavepacket.offset = " << wp->offset << "\n";
        out << "wavepacket.k_center = " << format_double(wp->k_center) << "\n";
        out << "wavepacket.include_second = " << (wp->include_second ? "true" : "false") << "\n";
        out << "wavepacket.route = " << (cfg.wavepacket_via_propagator ? "propagator" : "pairs") << "\n";
    } else {
        const Eigen::MatrixXcd& m = std::get<MatrixStart>(cfg.initial).matrix;
        std::vector<double> re;
        std::vector<double> im;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index k = 0; k < m.cols(); ++k) {
                re.push_back(m(i, k).real());
                im.push_back(m(i, k).imag());
            }
        }
        out << "initial.kind = matrix\n";
        out << "initial.matrix.re = " << join(re) << "\n";
        out << "initial.matrix.im = " << join(im) << "\n";
    }
    out << "# time grid in units of 1/energy\n";
    out << "grid.tmax = " << format_double(cfg.t_max) << "\n";
    out << "grid.steps = " << cfg.steps << "\n";
    if (!cfg.times.empty()) out << "grid.times = " << join(cfg.times) << "\n";
    out << "observables = ";
    for (std::size_t i = 0; i < cfg.observables.size(); ++i) {
        out << (i > 0 ? ", " : "") << to_string(cfg.observables[i]);
    }
    out << "\n";
    out << "sum_form = " << to_string(cfg.sum_form) << "\n";
    out << "tolerance = " << format_double(cfg.tolerance) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "output.format = " << (cfg.format == OutputFormat::kCsv ? "csv" : "json") << "\n";
    if (!cfg.output_path.empty()) out << "output.path = " << cfg.output_path << "\n";
    return out.str();
}

void RunConfig::validate() const {
    ring.validate();
    if (bath) bath->validate();
    if (const auto* s = std::get_if<SiteStart>(&initial)) {
        require_site(ring, s->site, "initial.site");
    } else if (const auto* wp = std::get_if<WavepacketSpec>(&initial)) {
        if (wp->n_sites != ring.n_sites) throw ValidationError("wavepacket.n_sites must equal ring.sites");
        wp->validate();
    } else {
        const Eigen::MatrixXcd& m = std::get<MatrixStart>(initial).matrix;
        require_dim(ring, m);
        DensityMatrix::from_matrix(m);
    }
    if (times.empty()) {
        TimeGrid::uniform(t_max, steps);
    } else {
        TimeGrid{times}.validate();
    }
    if (observables.empty()) throw ValidationError("observables must not be empty");
    if (!(tolerance > 0.0) || !(tolerance < 1.0)) throw ValidationError("tolerance must lie in (0, 1)");
}

TimeGrid RunConfig::grid() const { return times.empty() ? TimeGrid::uniform(t_max, steps) : TimeGrid{times}; }

DensityMatrix RunConfig::initial_density() const {
    if (const auto* s = std::get_if<SiteStart>(&initial)) return DensityMatrix::site(ring.n_sites, s->site);
    if (const auto* wp = std::get_if<WavepacketSpec>(&initial)) return build_state(*wp).density();
    return DensityMatrix::from_matrix(std::get<MatrixStart>(initial).matrix);
}

void SweepSpec::validate() const {
    if (values.empty()) throw ValidationError("sweep needs at least one value");
    for (double v : values) {
        if (!std::isfinite(v)) throw ValidationError("sweep values must be finite");
    }
    for (double v : values) at(v).validate();
}

RunConfig SweepSpec::at(double value) const {
    RunConfig cfg = base;
    cfg.output_path.clear();
    switch (axis) {
        case SweepAxis::kFlux: cfg.ring.flux = value; break;
        case SweepAxis::kLambda: cfg.bath = BathSpec{GaussianEnsemble{value}}; break;
        case SweepAxis::kWidth:
            if (!std::holds_alternative<WavepacketSpec>(cfg.initial)) {
                throw ValidationError("a width sweep needs a wave-packet initial state");
            }
            std::get<WavepacketSpec>(cfg.initial).width = value;
            break;
    }
    return cfg;
}

}  // namespace ringdeco
