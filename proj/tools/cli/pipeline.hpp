#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace kerrbath::cli {

cplx initial_amplitude(const SystemParams& p);

/// Coherent state or cat pair on the smallest admissible Fock space.
DensityMatrix initial_state(const RunConfig& c);

/// Integrates the configured initial state; the cat overlap is recorded for
/// cat initial states.
Trajectory run_trajectory(const RunConfig& c);

void write_trajectory_csv(const std::string& path, const Trajectory& t);

struct TrajectoryColumns {
    std::vector<double> tau, x, re_a, im_a, n, trace, herm_defect;
};
TrajectoryColumns read_trajectory_csv(const std::string& path);

struct RecurrenceAnalysis {
    std::vector<BumpFit> bumps;  ///< consecutive bumps from n = 0
    std::optional<DecoherenceFit> decay;
    std::vector<std::string> notes;
};

/// Gaussian fits of each resolved recurrence bump of |x| and, when two or
/// more are resolved, the peak-ratio decoherence fit.
RecurrenceAnalysis analyze_recurrences(const Trajectory& t, const SystemParams& p);

/// Position series for spectra: a fresh run over spectrum_recurrences
/// recurrence times with the final sample dropped, so the window holds whole
/// periods of the closed-system signal.
struct SpectrumSeries {
    std::vector<double> tau, x;
    Trajectory run;
};
SpectrumSeries spectrum_series(const RunConfig& c);

// Decoherence-time sweeps ------------------------------------------------

struct Draw {
    int index = 0;
    double intensity = 0.0, mu_bar = 0.0, beta_bar = 0.0, gamma = 0.0;
    bool operator==(const Draw&) const = default;
};

/// Effective ranges after the optional desk-scale clamp.
SweepRanges effective_ranges(const SweepRanges& r);
void validate_ranges(const SweepRanges& r);

/// I0 uniform, the other three log-uniform; identical for identical seeds.
std::vector<Draw> draw_parameters(std::uint64_t seed, int count, const SweepRanges& r);

struct DrawResult {
    Draw draw;
    bool ok = false;
    std::string error;
    double tau_D_theory = 0.0;
    double tau_D_exact = 0.0;
    double tau_D_fit = 0.0;
    double ci_low = 0.0, ci_high = 0.0;
    double secondary_rate = 0.0;
    double residual_norm = 0.0;
    double tau_end = 0.0;
    double dt = 0.0;
    int dimension = 0;
    double max_trace_error = 0.0, max_herm_defect = 0.0, min_eigenvalue = 0.0;
    std::vector<std::string> warnings;
};

/// Fit window: until the predicted decay exponent reaches 2, capped at tau_R.
double decoherence_window(const SystemParams& p, double tau_D);

/// Runs one draw with the integrator settings of base and fits tau_D from
/// the interaction-frame amplitude.
DrawResult run_draw(const Draw& d, const RunConfig& base);

}  // namespace kerrbath::cli
