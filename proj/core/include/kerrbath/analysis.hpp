#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace kerrbath {

struct Peak {
    double tau = 0.0;
    double height = 0.0;
};

/// Local maxima of |x| (parabolically refined) above floor_fraction * max|x|.
/// A maximum at the first sample counts. Throws FitError when none are found.
std::vector<Peak> extract_envelope_peaks(const std::vector<double>& tau, const std::vector<double>& x,
                                         double floor_fraction = 1e-3);

/// Peaks with |tau - center| <= half_width.
std::vector<Peak> peaks_near(const std::vector<Peak>& peaks, double center, double half_width);

struct BumpFit {
    int n = 0;
    double center = 0.0;       ///< n tau_R, held fixed in the width fit
    double free_center = 0.0;  ///< vertex of an unconstrained quadratic
    double tau_E = 0.0;
    double peak_height = 0.0;  ///< fitted height at the center
    double residual_norm = 0.0;
    std::size_t points = 0;
};

/// Least squares of ln(height) against -(tau - n tau_R)^2 / 2 tau_E^2 + c.
BumpFit fit_ehrenfest_bump(const std::vector<Peak>& peaks, int n, double tau_R);

enum class DecoherenceMethod { peak_ratio, cat_overlap, recurrence_envelope };

std::string_view to_string(DecoherenceMethod m);

struct DecoherenceFit {
    DecoherenceMethod method = DecoherenceMethod::peak_ratio;
    double tau_D = 0.0;
    double ci_low = 0.0;  ///< 95% interval from the slope standard error
    double ci_high = 0.0;
    double rate = 0.0;
    double secondary_rate = 0.0;  ///< linear term of the envelope fit
    double b1_estimate = 0.0;     ///< cat-overlap only: rate / 2 dx^2
    double residual_norm = 0.0;
};

/// Heights of successive recurrence bumps, h_n ~ exp(-n tau_R / tau_D).
DecoherenceFit fit_recurrence_decay(const std::vector<double>& heights, double tau_R);

struct RelaxationFit {
    double tau_gamma = 0.0;
    double amplitude = 0.0;
    double residual_norm = 0.0;           ///< RMS of log residuals, exponential model
    double gaussian_residual_norm = 0.0;  ///< same for exp(-tau^2 / 2 tau_E^2)
    bool gaussian_rejected = false;       ///< gaussian residual >= 5x exponential
    bool span_ok = false;                 ///< series spans >= 2 tau_gamma
};

/// Exponential fit of the envelope of x; tau_E_model <= 0 skips the Gaussian comparison.
RelaxationFit fit_relaxation_decay(const std::vector<double>& tau, const std::vector<double>& x,
                                   double tau_E_model = 0.0);

struct Spectrum {
    std::vector<double> omega;
    std::vector<double> re;  ///< phase referenced to the first sample
    std::vector<double> im;
    std::vector<double> magnitude;
    double d_omega = 0.0;
};

struct SpectrumOptions {
    bool hann = false;
    int zero_pad = 1;  ///< transform length multiplier
};

/// One-sided DFT scaled so that A cos(w0 tau) peaks near A at w0.
Spectrum discrete_spectrum(const std::vector<double>& x, double dt, SpectrumOptions opt = {});

struct SpectrumFit {
    double center = 0.0;
    double width = 0.0;
    double tau_E_estimate = 0.0;  ///< 1 / width
    double residual_norm = 0.0;
    std::size_t points = 0;
    bool comb = false;
    std::string warning;
};

/// Gaussian fit of the in-phase spectrum around its dominant lobe. When the
/// spectrum is a line comb only the line maxima enter the fit.
SpectrumFit fit_spectral_width(const Spectrum& s, double threshold_fraction = 0.1);

/// Exponential rate of |<alpha| rho |beta>|; samples below floor * |first| are dropped.
/// delta_x is the amplitude separation |Re(alpha - beta)| for windows short
/// against the carrier period, |alpha - beta| / sqrt(2) for long ones.
DecoherenceFit cat_offdiagonal_rate(const std::vector<double>& tau, const std::vector<double>& overlap_abs,
                                    double delta_x, double floor = 1e-12);

/// Fits ln|a_I(tau) / alpha0| = -r (tau - sin(2 mu tau) / 2 mu) - s tau, where
/// a_I is the interaction-frame amplitude; tau_D = 1 / r.
DecoherenceFit fit_interaction_decay(const std::vector<double>& tau,
                                     const std::vector<std::complex<double>>& a_interaction,
                                     double alpha_abs, double mu_bar);

}  // namespace kerrbath
