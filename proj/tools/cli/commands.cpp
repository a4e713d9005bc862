#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <ctime>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "cli/pipeline.hpp"
#include "json.hpp"
#include "kerrbath/closedform.hpp"
#include "kerrbath/error.hpp"
#include "kerrbath/kernels.hpp"

#ifndef KERRBATH_VERSION
#define KERRBATH_VERSION "0.0.0"
#endif

namespace kerrbath::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const char* tool_version() { return KERRBATH_VERSION; }

namespace {

// JSON has no infinities; they are written as strings.
json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double from_num(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    return std::nan("");
}

json header() {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = tool_version();
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    // Write then rename so readers never see half a file.
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw Error("cannot write '" + tmp.string() + "'");
        f << text;
        if (!f) throw Error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot read '" + path.string() + "'");
    return json::parse(f);
}

fs::path prepare_out(const std::string& dir) {
    if (dir.empty()) throw ValidationError("output directory must not be empty");
    fs::create_directories(dir);
    return fs::path(dir);
}

json params_json(const SystemParams& p) {
    return {{"mu_bar", p.mu_bar},       {"intensity", p.intensity}, {"theta", p.theta},
            {"beta_bar", p.beta_bar},   {"gamma", p.gamma},         {"lambda_bar", p.lambda_bar}};
}

json config_json(const RunConfig& c) {
    json j = json::object();
    for (const auto& [k, v] : config_entries(c)) j[k] = v;
    return j;
}

json timescales_json(const SystemParams& p) {
    const Timescales t = derive_timescales(p);
    const Timescales e = derive_timescales(p, DecoherenceFormula::exact);
    const RegimeReport r = classify_regime(t);
    json ordering = json::array();
    for (const auto& s : r.ordering) ordering.push_back({{"name", s.name}, {"value", num(s.value)}});
    return {
        {"tau_cl", num(t.tau_cl)},
        {"tau_E", num(t.tau_E)},
        {"tau_R", num(t.tau_R)},
        {"tau_D", num(t.tau_D)},
        {"tau_D_exact", num(e.tau_D)},
        {"tau_gamma", num(t.tau_gamma)},
        {"theta", num(t.theta_ratio)},
        {"omega_bar", p.omega_bar()},
        {"omega_eff", num(effective_frequency(p))},
        {"regime", std::string(to_string(r.regime))},
        {"ordering", ordering},
    };
}

json diagnostics_json(const Trajectory& t) {
    return {
        {"samples", t.size()},
        {"steps", t.steps},
        {"dt", t.dt},
        {"dimension", t.dimension},
        {"max_trace_error", num(t.max_trace_error())},
        {"max_herm_defect", num(t.max_herm_defect())},
        {"max_energy_drift", num(t.max_energy_drift())},
        {"min_eigenvalue", t.eigen_tau.empty() ? json(nullptr) : num(t.min_eigen())},
        {"warnings", t.warnings},
    };
}

json decoherence_json(const DecoherenceFit& f) {
    return {{"method", std::string(to_string(f.method))},
            {"tau_D", num(f.tau_D)},
            {"ci_low", num(f.ci_low)},
            {"ci_high", num(f.ci_high)},
            {"rate", num(f.rate)},
            {"secondary_rate", num(f.secondary_rate)},
            {"b1_estimate", num(f.b1_estimate)},
            {"residual_norm", num(f.residual_norm)}};
}

json analysis_json(const Trajectory& t, const RunConfig& c, const SystemParams& p) {
    json j;
    json notes = json::array();
    const RecurrenceAnalysis rec = analyze_recurrences(t, p);
    json bumps = json::array();
    for (const auto& b : rec.bumps) {
        bumps.push_back({{"n", b.n},
                         {"center", b.center},
                         {"free_center", b.free_center},
                         {"tau_E", num(b.tau_E)},
                         {"peak_height", b.peak_height},
                         {"points", b.points},
                         {"residual_norm", b.residual_norm}});
    }
    j["bumps"] = bumps;
    j["recurrence_decay"] = rec.decay ? decoherence_json(*rec.decay) : json(nullptr);
    for (const auto& n : rec.notes) notes.push_back(n);

    j["interaction_decay"] = nullptr;
    if (c.mode != EvolutionMode::closed && p.gamma > 0.0 && p.mu_bar > 0.0 && t.size() >= 8) {
        try {
            j["interaction_decay"] = decoherence_json(
                fit_interaction_decay(t.tau, t.a_interaction, std::sqrt(p.intensity), p.mu_bar));
        } catch (const FitError& e) {
            notes.push_back(std::string("interaction decay: ") + e.what());
        }
    }

    j["relaxation"] = nullptr;
    try {
        const auto r = fit_relaxation_decay(t.tau, t.x, derive_timescales(p).tau_E);
        j["relaxation"] = {{"tau_gamma", num(r.tau_gamma)},
                           {"amplitude", r.amplitude},
                           {"residual_norm", r.residual_norm},
                           {"gaussian_residual_norm", r.gaussian_residual_norm},
                           {"gaussian_rejected", r.gaussian_rejected},
                           {"span_ok", r.span_ok}};
    } catch (const FitError& e) {
        notes.push_back(std::string("relaxation: ") + e.what());
    }

    j["cat_decay"] = nullptr;
    if (c.initial == InitialState::cat && !t.cat_overlap.empty()) {
        std::vector<double> mag;
        for (const auto& v : t.cat_overlap) mag.push_back(std::abs(v));
        const cplx a = initial_amplitude(p);
        const double dx = std::abs(a - a * std::polar(1.0, c.cat_phase)) / std::sqrt(2.0);
        try {
            j["cat_decay"] = decoherence_json(cat_offdiagonal_rate(t.tau, mag, dx));
        } catch (const FitError& e) {
            notes.push_back(std::string("cat decay: ") + e.what());
        }
    }
    j["notes"] = notes;
    return j;
}

}  // namespace

// timescales ---------------------------------------------------------------

int cmd_timescales(const RunConfig& c, std::ostream& log) {
    const SystemParams p = c.resolved();
    require_valid(p);
    json j = header();
    j["params"] = params_json(p);
    j["formula"] = c.formula == DecoherenceFormula::exact ? "exact" : "headline";
    j["timescales"] = timescales_json(p);
    j["warnings"] = validate_params(p).warnings();
    const fs::path out = prepare_out(c.out_dir);
    write_json(out / "timescales.json", j);
    log << j.dump(2) << '\n';
    return kExitOk;
}

// simulate -----------------------------------------------------------------

int cmd_simulate(const RunConfig& c, std::ostream& log) {
    const SystemParams p = c.resolved();
    require_valid(p);
    const fs::path out = prepare_out(c.out_dir);

    Trajectory t;
    std::string error;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        t = run_trajectory(c);
    } catch (const IntegrationError& e) {
        t = e.partial();
        error = e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_trajectory_csv((out / "trajectory.csv").string(), t);

    json j = header();
    j["generated_at"] = utc_timestamp();
    j["config"] = config_json(c);
    j["params"] = params_json(p);
    j["timescales"] = timescales_json(p);
    j["partial"] = !error.empty();
    j["error"] = error.empty() ? json(nullptr) : json(error);
    j["diagnostics"] = diagnostics_json(t);
    j["analysis"] = error.empty() ? analysis_json(t, c, p) : json(nullptr);
    write_json(out / "trajectory.json", j);

    log << "simulate: " << t.size() << " samples, " << t.steps << " steps of " << t.dt << " in " << seconds
        << " s\n";
    for (const auto& w : t.warnings) log << "warning: " << w << '\n';
    if (!error.empty()) {
        log << "integration failed: " << error << " (partial output written)\n";
        return kExitIntegration;
    }
    return kExitOk;
}

// compare ------------------------------------------------------------------

int cmd_compare(const RunConfig& c, std::ostream& log) {
    if (c.mode != EvolutionMode::closed && c.mode != EvolutionMode::lindblad_rwa)
        throw ValidationError("compare needs mode closed or lindblad-rwa, got " + std::string(to_string(c.mode)));
    if (c.initial != InitialState::coherent) throw ValidationError("compare needs a coherent initial state");
    const SystemParams p = c.resolved();
    require_valid(p);
    if (c.tolerance < 0.0) throw ValidationError("tolerance must be >= 0");
    const double tol = c.tolerance > 0.0 ? c.tolerance : (c.mode == EvolutionMode::closed ? 1e-6 : 1e-3);
    const fs::path out = prepare_out(c.out_dir);

    const Trajectory t = run_trajectory(c);
    const cplx a0 = initial_amplitude(p);
    const double scale = std::abs(a0);
    double max_dev = 0.0, sum_sq = 0.0, tau_max = 0.0;
    std::ofstream csv(out / "compare.csv");
    csv << "tau,re_a,im_a,re_ref,im_ref,deviation\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        const cplx ref = c.mode == EvolutionMode::closed ? alpha_closed(a0, p.mu_bar, t.tau[i])
                                                          : alpha_lindblad_rwa(a0, p.mu_bar, p.gamma, t.tau[i]);
        const double d = std::abs(t.a[i] - ref);
        if (d > max_dev) {
            max_dev = d;
            tau_max = t.tau[i];
        }
        sum_sq += d * d;
        csv << format_number(t.tau[i]) << ',' << format_number(t.a[i].real()) << ',' << format_number(t.a[i].imag())
            << ',' << format_number(ref.real()) << ',' << format_number(ref.imag()) << ',' << format_number(d)
            << '\n';
    }
    csv.close();
    const double rms = t.size() ? std::sqrt(sum_sq / static_cast<double>(t.size())) : 0.0;
    const bool pass = max_dev <= tol * scale;

    json j = header();
    j["mode"] = std::string(to_string(c.mode));
    j["params"] = params_json(p);
    j["samples"] = t.size();
    j["max_deviation"] = max_dev;
    j["rms_deviation"] = rms;
    j["max_relative_deviation"] = max_dev / scale;
    j["tau_at_max"] = tau_max;
    j["tolerance_relative"] = tol;
    j["tolerance_absolute"] = tol * scale;
    j["passed"] = pass;
    j["diagnostics"] = diagnostics_json(t);
    write_json(out / "compare.json", j);

    log << "compare (" << to_string(c.mode) << "): max |da| = " << max_dev << " (" << max_dev / scale
        << " relative), rms " << rms << ", tolerance " << tol << " relative: " << (pass ? "pass" : "FAIL") << '\n';
    return pass ? kExitOk : kExitTolerance;
}

// spectrum -----------------------------------------------------------------

int cmd_spectrum(const RunConfig& c, const std::string& input, std::ostream& log) {
    const SystemParams p = c.resolved();
    require_valid(p);
    if (c.spectrum_zero_pad < 1) throw ValidationError("spectrum_zero_pad must be >= 1");

    std::vector<double> tau, x;
    std::string source;
    if (!input.empty()) {
        auto cols = read_trajectory_csv(input);
        tau = std::move(cols.tau);
        x = std::move(cols.x);
        source = input;
    } else {
        SpectrumSeries series = spectrum_series(c);
        tau = std::move(series.tau);
        x = std::move(series.x);
        source = "fresh run";
    }
    if (tau.size() < 4) throw ValidationError("spectrum needs at least 4 samples");
    const double dt = tau[1] - tau[0];
    for (std::size_t i = 1; i < tau.size(); ++i) {
        if (std::abs(tau[i] - tau[i - 1] - dt) > 1e-6 * dt) throw ValidationError("spectrum needs uniform sampling");
    }
    const fs::path out = prepare_out(c.out_dir);

    SpectrumOptions opt;
    opt.hann = c.spectrum_hann;
    opt.zero_pad = c.spectrum_zero_pad;
    const Spectrum s = discrete_spectrum(x, dt, opt);
    {
        std::ofstream csv(out / "spectrum.csv");
        csv << "omega,amplitude,re,im\n";
        for (std::size_t i = 0; i < s.omega.size(); ++i) {
            csv << format_number(s.omega[i]) << ',' << format_number(s.magnitude[i]) << ','
                << format_number(s.re[i]) << ',' << format_number(s.im[i]) << '\n';
        }
    }

    const double tau_E = derive_timescales(p).tau_E;
    const double omega_cl = 1.0 + 2.0 * p.mu_bar * p.intensity;
    json j = header();
    j["source"] = source;
    j["params"] = params_json(p);
    j["samples"] = tau.size();
    j["dt"] = dt;
    j["d_omega"] = s.d_omega;
    j["tau_E_model"] = num(tau_E);
    j["omega_classical"] = omega_cl;
    j["fit"] = nullptr;
    j["fit_error"] = nullptr;
    try {
        const SpectrumFit f = fit_spectral_width(s);
        j["fit"] = {{"center", f.center},
                    {"width", f.width},
                    {"tau_E_estimate", f.tau_E_estimate},
                    {"width_times_tau_E", num(f.width * tau_E)},
                    {"center_offset", f.center - omega_cl},
                    {"residual_norm", f.residual_norm},
                    {"points", f.points},
                    {"comb", f.comb},
                    {"warning", f.warning}};
        log << "spectrum: center " << f.center << ", width " << f.width << ", width * tau_E = " << f.width * tau_E
            << '\n';
        if (!f.warning.empty()) log << "warning: " << f.warning << '\n';
    } catch (const FitError& e) {
        j["fit_error"] = e.what();
        log << "spectrum: width fit failed: " << e.what() << '\n';
    }
    write_json(out / "spectrum.json", j);
    return kExitOk;
}

// regimes ------------------------------------------------------------------

std::string survival_condition(double theta) {
    if (theta >= kThetaQuantum) return "satisfied";
    if (theta <= kThetaClassical) return "failed";
    return "marginal";
}

int cmd_regimes_bec(const BecInputs& in, const std::string& out_dir, std::ostream& log) {
    const double theta = theta_bec(in.scattering_length, in.mass, in.trap_omega, in.particles, in.tau_gamma);
    json j = header();
    j["system"] = "bec";
    j["inputs"] = {{"scattering_length", in.scattering_length},
                   {"mass", in.mass},
                   {"trap_omega", in.trap_omega},
                   {"particles", in.particles},
                   {"tau_gamma", in.tau_gamma}};
    j["theta"] = theta;
    j["condition"] = survival_condition(theta);
    // Theta grows as sqrt(N).
    j["particles_at_theta_1"] = in.particles / (theta * theta);
    write_json(prepare_out(out_dir) / "regimes.json", j);
    log << "bec: Theta = " << theta << ", condition " << survival_condition(theta) << '\n';
    return kExitOk;
}

int cmd_regimes_cantilever(const CantileverInputs& in, const std::string& out_dir, std::ostream& log) {
    const double theta = theta_cantilever(in.mu_cl, in.quality, in.levels);
    const double threshold = std::sqrt(in.levels) / (4.0 * in.quality);
    json j = header();
    j["system"] = "cantilever";
    j["inputs"] = {{"mu_cl", in.mu_cl}, {"quality", in.quality}, {"levels", in.levels}};
    j["theta"] = theta;
    j["condition"] = survival_condition(theta);
    j["mu_cl_at_theta_1"] = threshold;
    write_json(prepare_out(out_dir) / "regimes.json", j);
    log << "cantilever: Theta = " << theta << ", condition " << survival_condition(theta)
        << ", threshold mu_cl = " << threshold << '\n';
    return kExitOk;
}

// sweep --------------------------------------------------------------------

namespace {

json draw_json(const Draw& d) {
    return {{"index", d.index},
            {"intensity", d.intensity},
            {"mu_bar", d.mu_bar},
            {"beta_bar", d.beta_bar},
            {"gamma", d.gamma}};
}

json result_json(const DrawResult& r) {
    json j = header();
    j["draw"] = draw_json(r.draw);
    j["ok"] = r.ok;
    j["error"] = r.error;
    j["method"] = "recurrence-envelope";
    j["tau_D_theory"] = num(r.tau_D_theory);
    j["tau_D_exact"] = num(r.tau_D_exact);
    j["tau_D_fit"] = num(r.tau_D_fit);
    j["ci_low"] = num(r.ci_low);
    j["ci_high"] = num(r.ci_high);
    j["secondary_rate"] = num(r.secondary_rate);
    j["residual_norm"] = num(r.residual_norm);
    j["tau_end"] = r.tau_end;
    j["dt"] = r.dt;
    j["dimension"] = r.dimension;
    j["max_trace_error"] = num(r.max_trace_error);
    j["max_herm_defect"] = num(r.max_herm_defect);
    j["min_eigenvalue"] = num(r.min_eigenvalue);
    j["warnings"] = r.warnings;
    return j;
}

DrawResult result_from_json(const json& j) {
    DrawResult r;
    const auto& d = j.at("draw");
    r.draw = {d.at("index").get<int>(), d.at("intensity").get<double>(), d.at("mu_bar").get<double>(),
              d.at("beta_bar").get<double>(), d.at("gamma").get<double>()};
    r.ok = j.at("ok").get<bool>();
    r.error = j.at("error").get<std::string>();
    r.tau_D_theory = from_num(j.at("tau_D_theory"));
    r.tau_D_exact = from_num(j.at("tau_D_exact"));
    r.tau_D_fit = from_num(j.at("tau_D_fit"));
    r.ci_low = from_num(j.at("ci_low"));
    r.ci_high = from_num(j.at("ci_high"));
    r.secondary_rate = from_num(j.at("secondary_rate"));
    r.residual_norm = from_num(j.at("residual_norm"));
    r.tau_end = j.at("tau_end").get<double>();
    r.dt = j.at("dt").get<double>();
    r.dimension = j.at("dimension").get<int>();
    r.max_trace_error = from_num(j.at("max_trace_error"));
    r.max_herm_defect = from_num(j.at("max_herm_defect"));
    r.min_eigenvalue = from_num(j.at("min_eigenvalue"));
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

// The parts of a config that change what a sweep computes.
json sweep_identity(const RunConfig& c) {
    json j = config_json(c);
    for (const char* k : {"out", "workers", "tolerance", "spectrum_hann", "spectrum_zero_pad", "spectrum_recurrences",
                          "mu_bar", "intensity", "theta", "beta_bar", "gamma", "lambda_bar", "initial", "cat_phase",
                          "tau_end"})
        j.erase(k);
    return j;
}

std::string draw_file(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "draws/draw_%04d.json", index);
    return buf;
}

struct Entry {
    Draw draw;
    std::string status = "pending";  // pending | complete | failed
    std::string error;
    std::optional<DrawResult> result;
};

json manifest_json(const RunConfig& c, const std::vector<Entry>& entries) {
    const SweepRanges e = effective_ranges(c.ranges);
    json j = header();
    j["seed"] = c.seed;
    j["draws"] = entries.size();
    j["sampling"] = {{"intensity", "uniform"}, {"mu_bar", "log-uniform"}, {"beta_bar", "log-uniform"},
                     {"gamma", "log-uniform"}};
    j["ranges"] = {{"intensity", {e.intensity_min, e.intensity_max}},
                   {"mu_bar", {e.mu_min, e.mu_max}},
                   {"beta_bar", {e.beta_min, e.beta_max}},
                   {"gamma", {e.gamma_min, e.gamma_max}},
                   {"desk_clamp", c.ranges.desk_clamp}};
    j["settings"] = sweep_identity(c);
    json list = json::array();
    std::size_t done = 0;
    for (const auto& en : entries) {
        json d = draw_json(en.draw);
        d["status"] = en.status;
        d["result"] = draw_file(en.draw.index);
        if (!en.error.empty()) d["error"] = en.error;
        list.push_back(d);
        if (en.status != "pending") ++done;
    }
    j["complete"] = done == entries.size();
    j["entries"] = list;
    return j;
}

}  // namespace

int cmd_sweep(const RunConfig& c, std::ostream& log) {
    if (c.workers < 1) throw ValidationError("workers must be >= 1");
    const std::vector<Draw> draws = draw_parameters(c.seed, c.draws, c.ranges);
    const fs::path out = prepare_out(c.out_dir);
    fs::create_directories(out / "draws");
    const fs::path manifest_path = out / "manifest.json";

    std::vector<Entry> entries;
    for (const auto& d : draws) {
        Entry e;
        e.draw = d;
        entries.push_back(e);
    }

    // Resume: keep finished draws from an earlier run of the same sweep.
    if (fs::exists(manifest_path)) {
        const json old = read_json(manifest_path);
        const json fresh = manifest_json(c, entries);
        // Compare without regard to key order.
        auto same = [&](const char* k) {
            return nlohmann::json::parse(old.value(k, json()).dump()) == nlohmann::json::parse(fresh[k].dump());
        };
        if (!same("seed") || !same("draws") || !same("ranges") || !same("settings"))
            throw ValidationError("'" + manifest_path.string() +
                                  "' belongs to a different sweep; choose another output directory");
        std::size_t kept = 0;
        for (const auto& e : old.at("entries")) {
            const int i = e.at("index").get<int>();
            const std::string status = e.at("status").get<std::string>();
            if (status == "pending" || i < 0 || i >= static_cast<int>(entries.size())) continue;
            const fs::path rp = out / e.at("result").get<std::string>();
            if (!fs::exists(rp)) continue;
            try {
                DrawResult r = result_from_json(read_json(rp));
                if (!(r.draw == entries[i].draw)) continue;
                entries[i].status = r.ok ? "complete" : "failed";
                entries[i].error = r.error;
                entries[i].result = std::move(r);
                ++kept;
            } catch (const std::exception&) {
                // unreadable result: run the draw again
            }
        }
        log << "sweep: resuming, " << kept << " of " << entries.size() << " draws already done\n";
    }
    write_json(manifest_path, manifest_json(c, entries));

    std::vector<int> queue;
    for (const auto& e : entries)
        if (e.status == "pending") queue.push_back(e.draw.index);

    // Workers compute and write their own result files; this thread is the
    // only one touching the manifest.
    std::mutex mu;
    std::condition_variable cv;
    std::deque<DrawResult> finished;
    std::size_t next = 0;
    auto worker = [&] {
        for (;;) {
            int index;
            {
                std::lock_guard lock(mu);
                if (next >= queue.size()) return;
                index = queue[next++];
            }
            DrawResult r = run_draw(entries[index].draw, c);
            try {
                write_json(out / draw_file(index), result_json(r));
            } catch (const std::exception& e) {
                r.ok = false;
                r.error = e.what();
            }
            {
                std::lock_guard lock(mu);
                finished.push_back(std::move(r));
            }
            cv.notify_one();
        }
    };
    std::vector<std::jthread> pool;
    const int n_workers = std::min<int>(c.workers, static_cast<int>(std::max<std::size_t>(queue.size(), 1)));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);

    for (std::size_t received = 0; received < queue.size(); ++received) {
        DrawResult r;
        {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return !finished.empty(); });
            r = std::move(finished.front());
            finished.pop_front();
        }
        Entry& e = entries[r.draw.index];
        e.status = r.ok ? "complete" : "failed";
        e.error = r.error;
        if (r.ok) {
            log << "sweep: draw " << r.draw.index << " tau_D fit " << r.tau_D_fit << " theory " << r.tau_D_theory
                << '\n';
        } else {
            log << "sweep: draw " << r.draw.index << " failed: " << r.error << '\n';
        }
        e.result = std::move(r);
        write_json(manifest_path, manifest_json(c, entries));
    }
    pool.clear();

    std::ostringstream csv;
    csv << "index,intensity,mu_bar,beta_bar,gamma,tau_D_theory,tau_D_exact,tau_D_fit,ci_low,ci_high,status\n";
    std::vector<double> log_ratio;
    for (const auto& e : entries) {
        const DrawResult& r = *e.result;
        csv << e.draw.index << ',' << format_number(e.draw.intensity) << ',' << format_number(e.draw.mu_bar) << ','
            << format_number(e.draw.beta_bar) << ',' << format_number(e.draw.gamma) << ','
            << format_number(r.tau_D_theory) << ',' << format_number(r.tau_D_exact) << ','
            << format_number(r.ok ? r.tau_D_fit : std::nan("")) << ',' << format_number(r.ci_low) << ','
            << format_number(r.ci_high) << ',' << e.status << '\n';
        if (r.ok && r.tau_D_fit > 0.0) log_ratio.push_back(std::abs(std::log(r.tau_D_fit / r.tau_D_theory)));
    }
    write_text(out / "results.csv", csv.str());
    if (!log_ratio.empty()) {
        std::sort(log_ratio.begin(), log_ratio.end());
        const std::size_t m = log_ratio.size();
        const double median = m % 2 ? log_ratio[m / 2] : 0.5 * (log_ratio[m / 2 - 1] + log_ratio[m / 2]);
        log << "sweep: median |ln(fit / theory)| = " << median << " over " << m << " draws\n";
    }
    return kExitOk;
}

}  // namespace kerrbath::cli
