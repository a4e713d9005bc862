#pragma once

#include <complex>
#include <vector>

namespace kerrbath {

using cplx = std::complex<double>;

/// Exact <a>(tau) of the isolated oscillator.
cplx alpha_closed(cplx alpha0, double mu_bar, double tau);
double x_closed(cplx alpha0, double mu_bar, double tau);

/// exp(-n tau_R / tau_D) exp(-(tau - n tau_R)^2 / 2 tau_E^2).
double ehrenfest_envelope(double tau, double tau_E, int n_bump, double tau_R, double tau_D);

/// Exact <a>(tau) under the rotating-wave Lindblad equation.
cplx alpha_lindblad_rwa(cplx alpha0, double mu_bar, double gamma, double tau);

/// D(tau) such that |<a>(tau)| = |alpha0| e^{-D} under the RWA equation.
double decay_factor(cplx alpha0, double mu_bar, double gamma, double tau);

struct SpectrumLine {
    int index = 0;
    double frequency = 0.0;  ///< 1 + mu_bar (2n + 1)
    double weight = 0.0;     ///< Lambda(n)
    cplx amplitude;          ///< alpha0 Lambda(n); x = sqrt(2) Re sum amplitude e^{-i w tau}
};

struct FourierLines {
    std::vector<SpectrumLine> lines;
    double max_error = 0.0;  ///< largest quadrature error estimate on Lambda(n)
};

/// Lambda(n) for n in [n_first, n_last] by composite Gauss-Legendre over one
/// recurrence period. Requires mu_bar > 0.
FourierLines fourier_lines(cplx alpha0, double mu_bar, int n_first, int n_last);

/// Gaussian approximation x(0) (4 pi I0)^{-1/2} exp(-(w - w_cl)^2 / 2 dw^2),
/// w_cl = 1 + 2 mu_bar I0, dw = 2 mu_bar sqrt(I0).
double gaussian_spectrum(cplx alpha0, double mu_bar, double omega);

}  // namespace kerrbath
