#include "cli/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "kerrbath/error.hpp"

namespace kerrbath::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d))
        throw ValidationError("config key '" + key + "': '" + v + "' is not a finite number");
    return d;
}

long long to_integer(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 9.0e15)
        throw ValidationError("config key '" + key + "': '" + v + "' is not an integer");
    return static_cast<long long>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("config key '" + key + "': expected true or false, got '" + v + "'");
}

std::string_view to_string(InitialState s) { return s == InitialState::cat ? "cat" : "coherent"; }

std::string_view to_string(DecoherenceFormula f) {
    return f == DecoherenceFormula::exact ? "exact" : "headline";
}

std::string b(bool v) { return v ? "true" : "false"; }

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunConfig::RunConfig() {
    integrator.tau_end = 10.0;
    integrator.eigen_every = 0;
}

SystemParams RunConfig::resolved() const {
    SystemParams p = params;
    if (lambda_auto) p.lambda_bar = default_cutoff(p.mu_bar, p.intensity);
    return p;
}

bool RunConfig::operator==(const RunConfig& o) const { return config_entries(*this) == config_entries(o); }

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
    const std::string& v = value;
    auto& p = c.params;
    auto& ic = c.integrator;
    auto& r = c.ranges;
    if (key == "mu_bar") p.mu_bar = to_double(key, v);
    else if (key == "intensity") p.intensity = to_double(key, v);
    else if (key == "theta") p.theta = to_double(key, v);
    else if (key == "beta_bar") p.beta_bar = to_double(key, v);
    else if (key == "gamma") p.gamma = to_double(key, v);
    else if (key == "lambda_bar") {
        c.lambda_auto = v == "auto";
        if (!c.lambda_auto) p.lambda_bar = to_double(key, v);
    } else if (key == "mode") c.mode = parse_mode(v);
    else if (key == "stepper") ic.stepper = parse_stepper(v);
    else if (key == "dt") ic.dt = v == "auto" ? 0.0 : to_double(key, v);
    else if (key == "stride") ic.stride = static_cast<int>(to_integer(key, v));
    else if (key == "tau_end") ic.tau_end = to_double(key, v);
    else if (key == "positivity_tol") ic.positivity_tol = to_double(key, v);
    else if (key == "eigen_every") ic.eigen_every = static_cast<int>(to_integer(key, v));
    else if (key == "transient_points") ic.transient_points = static_cast<int>(to_integer(key, v));
    else if (key == "initial") {
        if (v == "coherent") c.initial = InitialState::coherent;
        else if (v == "cat") c.initial = InitialState::cat;
        else throw ValidationError("config key 'initial': expected coherent or cat, got '" + v + "'");
    } else if (key == "cat_phase") c.cat_phase = to_double(key, v);
    else if (key == "tau_d_formula") {
        if (v == "headline") c.formula = DecoherenceFormula::headline;
        else if (v == "exact") c.formula = DecoherenceFormula::exact;
        else throw ValidationError("config key 'tau_d_formula': expected headline or exact, got '" + v + "'");
    } else if (key == "out") c.out_dir = v;
    else if (key == "seed") {
        std::uint64_t s = 0;
        const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
        if (ec != std::errc() || end != v.data() + v.size() || v.empty())
            throw ValidationError("config key 'seed': '" + v + "' is not an unsigned integer");
        c.seed = s;
    } else if (key == "workers") c.workers = static_cast<int>(to_integer(key, v));
    else if (key == "tolerance") c.tolerance = to_double(key, v);
    else if (key == "draws") c.draws = static_cast<int>(to_integer(key, v));
    else if (key == "sweep_intensity_min") r.intensity_min = to_double(key, v);
    else if (key == "sweep_intensity_max") r.intensity_max = to_double(key, v);
    else if (key == "sweep_mu_min") r.mu_min = to_double(key, v);
    else if (key == "sweep_mu_max") r.mu_max = to_double(key, v);
    else if (key == "sweep_beta_min") r.beta_min = to_double(key, v);
    else if (key == "sweep_beta_max") r.beta_max = to_double(key, v);
    else if (key == "sweep_gamma_min") r.gamma_min = to_double(key, v);
    else if (key == "sweep_gamma_max") r.gamma_max = to_double(key, v);
    else if (key == "sweep_desk_clamp") r.desk_clamp = to_bool(key, v);
    else if (key == "spectrum_hann") c.spectrum_hann = to_bool(key, v);
    else if (key == "spectrum_zero_pad") c.spectrum_zero_pad = static_cast<int>(to_integer(key, v));
    else if (key == "spectrum_recurrences") c.spectrum_recurrences = to_double(key, v);
    else throw ValidationError("unknown config key '" + key + "'");
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            set_key(c, key, value);
        } catch (const ValidationError& e) {
            throw ValidationError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::map<std::string, std::string> config_entries(const RunConfig& c) {
    const auto& p = c.params;
    const auto& ic = c.integrator;
    const auto& r = c.ranges;
    const auto n = format_number;
    return {
        {"mu_bar", n(p.mu_bar)},
        {"intensity", n(p.intensity)},
        {"theta", n(p.theta)},
        {"beta_bar", n(p.beta_bar)},
        {"gamma", n(p.gamma)},
        {"lambda_bar", c.lambda_auto ? "auto" : n(p.lambda_bar)},
        {"mode", std::string(to_string(c.mode))},
        {"stepper", std::string(to_string(ic.stepper))},
        {"dt", ic.dt > 0.0 ? n(ic.dt) : "auto"},
        {"stride", std::to_string(ic.stride)},
        {"tau_end", n(ic.tau_end)},
        {"positivity_tol", n(ic.positivity_tol)},
        {"eigen_every", std::to_string(ic.eigen_every)},
        {"transient_points", std::to_string(ic.transient_points)},
        {"initial", std::string(to_string(c.initial))},
        {"cat_phase", n(c.cat_phase)},
        {"tau_d_formula", std::string(to_string(c.formula))},
        {"out", c.out_dir},
        {"seed", std::to_string(c.seed)},
        {"workers", std::to_string(c.workers)},
        {"tolerance", n(c.tolerance)},
        {"draws", std::to_string(c.draws)},
        {"sweep_intensity_min", n(r.intensity_min)},
        {"sweep_intensity_max", n(r.intensity_max)},
        {"sweep_mu_min", n(r.mu_min)},
        {"sweep_mu_max", n(r.mu_max)},
        {"sweep_beta_min", n(r.beta_min)},
        {"sweep_beta_max", n(r.beta_max)},
        {"sweep_gamma_min", n(r.gamma_min)},
        {"sweep_gamma_max", n(r.gamma_max)},
        {"sweep_desk_clamp", b(r.desk_clamp)},
        {"spectrum_hann", b(c.spectrum_hann)},
        {"spectrum_zero_pad", std::to_string(c.spectrum_zero_pad)},
        {"spectrum_recurrences", n(c.spectrum_recurrences)},
    };
}

std::string serialize_config(const RunConfig& c) {
    // Grouped order for readability; config_entries is the source of the values.
    static const std::vector<std::vector<std::string>> groups = {
        {"mu_bar", "intensity", "theta", "beta_bar", "gamma", "lambda_bar"},
        {"mode", "stepper", "dt", "stride", "tau_end", "positivity_tol", "eigen_every", "transient_points"},
        {"initial", "cat_phase", "tau_d_formula"},
        {"out", "seed", "workers", "tolerance"},
        {"draws", "sweep_intensity_min", "sweep_intensity_max", "sweep_mu_min", "sweep_mu_max", "sweep_beta_min",
         "sweep_beta_max", "sweep_gamma_min", "sweep_gamma_max", "sweep_desk_clamp"},
        {"spectrum_hann", "spectrum_zero_pad", "spectrum_recurrences"},
    };
    const auto e = config_entries(c);
    std::ostringstream out;
    out << "# kerrbath run configuration\n";
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (g) out << '\n';
        for (const auto& k : groups[g]) out << k << " = " << e.at(k) << '\n';
    }
    return out.str();
}

}  // namespace kerrbath::cli
