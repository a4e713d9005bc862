#include "cli/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "kerrbath/error.hpp"

namespace kerrbath::cli {

cplx initial_amplitude(const SystemParams& p) { return std::polar(std::sqrt(p.intensity), -p.theta); }

DensityMatrix initial_state(const RunConfig& c) {
    const SystemParams p = c.resolved();
    require_valid(p);
    const cplx a = initial_amplitude(p);
    if (c.initial == InitialState::coherent) return coherent_state_density(a, FockSpace(truncation_dimension(p.intensity)));
    const cplx b = a * std::polar(1.0, c.cat_phase);
    return cat_state_density(a, b, FockSpace(truncation_dimension(p.intensity)));
}

Trajectory run_trajectory(const RunConfig& c) {
    const SystemParams p = c.resolved();
    IntegratorConfig ic = c.integrator;
    if (c.initial == InitialState::cat) {
        const cplx a = initial_amplitude(p);
        ic.cat_pair = std::make_pair(a, a * std::polar(1.0, c.cat_phase));
    }
    return integrate(initial_state(c), c.mode, p, ic);
}

void write_trajectory_csv(const std::string& path, const Trajectory& t) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write '" + path + "'");
    f << "tau,x,re_a,im_a,n,trace,herm_defect\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        f << format_number(t.tau[i]) << ',' << format_number(t.x[i]) << ',' << format_number(t.a[i].real()) << ','
          << format_number(t.a[i].imag()) << ',' << format_number(t.n[i]) << ',' << format_number(t.trace[i]) << ','
          << format_number(t.herm_defect[i]) << '\n';
    }
}

TrajectoryColumns read_trajectory_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read trajectory '" + path + "'");
    std::string line;
    std::getline(f, line);
    if (line.rfind("tau,x,re_a,im_a,n,trace,herm_defect", 0) != 0)
        throw ValidationError("'" + path + "' is not a trajectory CSV");
    TrajectoryColumns c;
    int row = 1;
    while (std::getline(f, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ls, cell, ',')) {
            char* end = nullptr;
            v.push_back(std::strtod(cell.c_str(), &end));
            if (end == cell.c_str()) throw ValidationError("bad number in '" + path + "' row " + std::to_string(row));
        }
        if (v.size() != 7) throw ValidationError("'" + path + "' row " + std::to_string(row) + " has the wrong width");
        c.tau.push_back(v[0]);
        c.x.push_back(v[1]);
        c.re_a.push_back(v[2]);
        c.im_a.push_back(v[3]);
        c.n.push_back(v[4]);
        c.trace.push_back(v[5]);
        c.herm_defect.push_back(v[6]);
    }
    return c;
}

RecurrenceAnalysis analyze_recurrences(const Trajectory& t, const SystemParams& p) {
    RecurrenceAnalysis out;
    if (!(p.mu_bar > 0.0) || t.size() < 3) {
        out.notes.push_back("no recurrences without nonlinearity");
        return out;
    }
    const Timescales ts = derive_timescales(p);
    const double half = 3.5 * ts.tau_E;
    std::vector<Peak> peaks;
    try {
        peaks = extract_envelope_peaks(t.tau, t.x);
    } catch (const FitError& e) {
        out.notes.push_back(e.what());
        return out;
    }
    for (int n = 0;; ++n) {
        const double c = n * ts.tau_R;
        if (c + (n == 0 ? 0.0 : half) > t.tau.back()) break;
        try {
            out.bumps.push_back(fit_ehrenfest_bump(peaks_near(peaks, c, half), n, ts.tau_R));
        } catch (const FitError& e) {
            out.notes.push_back("bump " + std::to_string(n) + ": " + e.what());
            break;
        }
    }
    if (out.bumps.size() >= 2) {
        std::vector<double> h;
        for (const auto& b : out.bumps) h.push_back(b.peak_height);
        try {
            out.decay = fit_recurrence_decay(h, ts.tau_R);
        } catch (const FitError& e) {
            out.notes.push_back(e.what());
        }
    } else {
        out.notes.push_back("fewer than two recurrence bumps resolved; use the cat-overlap or envelope method");
    }
    return out;
}

SpectrumSeries spectrum_series(const RunConfig& c) {
    const SystemParams p = c.resolved();
    RunConfig run = c;
    const bool window = c.spectrum_recurrences > 0.0 && p.mu_bar > 0.0;
    if (window) run.integrator.tau_end = c.spectrum_recurrences * derive_timescales(p).tau_R;
    SpectrumSeries s;
    s.run = run_trajectory(run);
    s.tau = s.run.tau;
    s.x = s.run.x;
    if (window && s.tau.size() > 2) {
        s.tau.pop_back();
        s.x.pop_back();
    }
    return s;
}

SweepRanges effective_ranges(const SweepRanges& r) {
    SweepRanges e = r;
    if (r.desk_clamp) {
        e.intensity_max = std::min(e.intensity_max, 50.0);
        e.mu_max = std::min(e.mu_max, 1.0);
    }
    return e;
}

void validate_ranges(const SweepRanges& r) {
    auto check = [](double lo, double hi, const char* name) {
        if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi))
            throw ValidationError(std::string("sweep range for ") + name + " must satisfy 0 < min <= max");
    };
    const SweepRanges e = effective_ranges(r);
    check(e.intensity_min, e.intensity_max, "intensity");
    check(e.mu_min, e.mu_max, "mu_bar");
    check(e.beta_min, e.beta_max, "beta_bar");
    check(e.gamma_min, e.gamma_max, "gamma");
}

std::vector<Draw> draw_parameters(std::uint64_t seed, int count, const SweepRanges& r) {
    if (count < 0) throw ValidationError("draws must be >= 0");
    validate_ranges(r);
    const SweepRanges e = effective_ranges(r);
    // mt19937_64 output is fixed by the standard; the distributions are not,
    // so the unit interval is formed by hand.
    std::mt19937_64 rng(seed);
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto log_uniform = [&](double lo, double hi) { return std::exp(std::log(lo) + unit() * std::log(hi / lo)); };
    std::vector<Draw> out;
    for (int i = 0; i < count; ++i) {
        Draw d;
        d.index = i;
        d.intensity = e.intensity_min + unit() * (e.intensity_max - e.intensity_min);
        d.mu_bar = log_uniform(e.mu_min, e.mu_max);
        d.beta_bar = log_uniform(e.beta_min, e.beta_max);
        d.gamma = log_uniform(e.gamma_min, e.gamma_max);
        out.push_back(d);
    }
    return out;
}

double decoherence_window(const SystemParams& p, double tau_D) {
    const double tau_R = std::numbers::pi / p.mu_bar;
    const double r = 1.0 / tau_D;
    auto g = [&](double t) { return t - std::sin(2.0 * p.mu_bar * t) / (2.0 * p.mu_bar); };
    if (r * g(tau_R) <= 2.0) return tau_R;
    double lo = 0.0, hi = tau_R;
    for (int k = 0; k < 100; ++k) {
        const double mid = 0.5 * (lo + hi);
        (r * g(mid) < 2.0 ? lo : hi) = mid;
    }
    return hi;
}

DrawResult run_draw(const Draw& d, const RunConfig& base) {
    DrawResult res;
    res.draw = d;
    try {
        RunConfig c = base;
        c.params.intensity = d.intensity;
        c.params.mu_bar = d.mu_bar;
        c.params.beta_bar = d.beta_bar;
        c.params.gamma = d.gamma;
        c.params.theta = 0.0;
        c.lambda_auto = true;
        c.initial = InitialState::coherent;
        const SystemParams p = c.resolved();
        require_valid(p);
        res.tau_D_theory = derive_timescales(p, c.formula).tau_D;
        res.tau_D_exact = derive_timescales(p, DecoherenceFormula::exact).tau_D;

        c.integrator.tau_end = decoherence_window(p, res.tau_D_theory);
        const int dim = truncation_dimension(p.intensity);
        const double dt = c.integrator.dt > 0.0 ? c.integrator.dt : default_step(p, dim);
        const long steps = static_cast<long>(std::ceil(c.integrator.tau_end / dt));
        c.integrator.stride = static_cast<int>(std::max(1L, steps / 1500));
        if (c.integrator.eigen_every == 0) c.integrator.eigen_every = 50;

        const Trajectory t = run_trajectory(c);
        res.tau_end = c.integrator.tau_end;
        res.dt = t.dt;
        res.dimension = t.dimension;
        res.max_trace_error = t.max_trace_error();
        res.max_herm_defect = t.max_herm_defect();
        res.min_eigenvalue = t.min_eigen();
        res.warnings = t.warnings;

        const auto fit = fit_interaction_decay(t.tau, t.a_interaction, std::sqrt(p.intensity), p.mu_bar);
        res.tau_D_fit = fit.tau_D;
        res.ci_low = fit.ci_low;
        res.ci_high = fit.ci_high;
        res.secondary_rate = fit.secondary_rate;
        res.residual_norm = fit.residual_norm;
        res.ok = true;
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
    }
    return res;
}

}  // namespace kerrbath::cli
